#pragma once

#include <vector>

#include "odeinv/ode.hpp"

namespace odeinv {

/// Seeded generator for test equations and transformations.

/// Random equations with polynomial coefficients of total degree <= degree
/// and integer coefficients in [-coeff_bound, coeff_bound].
std::vector<OdeCoefficients> random_polynomial_odes(uint64_t seed, int n,
                                                    int degree,
                                                    int coeff_bound = 3);

OdeCoefficients fixed_zero_ode();  // y'' = 0
OdeCoefficients fixed_px2_ode();   // y'' = 1 + x^2 (y')^3
OdeCoefficients fixed_py2_ode();   // y'' = y^2

/// The three fixed equations followed by n random ones.
std::vector<OdeCoefficients> acceptance_corpus(uint64_t seed, int n,
                                               int degree);

/// Random invertible affine maps with small integer entries, inverses exact.
std::vector<PointTransformation> random_affine_maps(uint64_t seed, int n);

/// Five fixed nonlinear maps with exact polynomial inverses (including the
/// shear by x^2 and the coordinate swap).
std::vector<PointTransformation> fixed_nonlinear_maps();

}  // namespace odeinv
