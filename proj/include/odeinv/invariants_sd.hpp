#pragma once

#include "odeinv/fext.hpp"
#include "odeinv/ode.hpp"

namespace odeinv {

/// Components of the weight-1 pseudocovector built from the coefficients.
struct SdCovector {
  RatFunc A, B;
};

SdCovector covector_alpha(const OdeRf& ode);

/// Components of the weight-3 pseudocovector (-H, G): returns (G, H).
struct SdCovectorBeta {
  RatFunc G, H;
};

SdCovectorBeta covector_beta(const OdeRf& ode, const SdCovector& ab);

/// The weight-5 pseudoscalar F^5.
RatFunc pseudoscalar_F5(const OdeRf& ode, const SdCovector& ab);

/// Symmetric connection with F-terms reduced rationally through
/// dF/F = d(F^5)/(5 F^5).
struct Connection {
  RatFunc g1_11, g2_11;  // upper index 1/2, lower pair 11
  RatFunc g1_12, g2_12;  // = the 21 components by symmetry
  RatFunc g1_22, g2_22;
};

struct SdCore {
  RatFunc A, B, G, H, F5;
  Connection conn;
  FExtFieldPtr field;       // f^5 = F^5
  std::array<FExt, 2> X;    // (B/F^2, -A/F^2)
  std::array<FExt, 2> Y;    // (G/F^4, H/F^4)
};

/// Requires F^5 not identically zero.
SdCore frame_and_connection(const OdeRf& ode);

struct SdScalars {
  FExt I1, I2, I3, I4, I5, I6, I7, I8, L, K;
  /// I6 via the longer formula; the short one fills I6. Both must agree.
  FExt I6_alt;
};

/// The explicit closed-form route.
SdScalars scalars_explicit(const SdCore& core, const OdeRf& ode);

/// The independent route: covariant derivatives of the frame against the
/// connection, solving the four 2x2 linear systems, plus the commutator for
/// L and K.
SdScalars scalars_via_connection(const SdCore& core, const OdeRf& ode);

/// Directional derivative of a scalar along a frame field (invariant
/// differentiation).
FExt apply_operator(const std::array<FExt, 2>& field, const FExt& scalar);

/// Commutator [V, W] of two frame fields, componentwise.
std::array<FExt, 2> commutator(const std::array<FExt, 2>& V,
                               const std::array<FExt, 2>& W);

/// Solves U = a*V + b*W for (a, b); the frame matrix must have a
/// single-grade determinant (it is 3/F for the invariant frame).
std::pair<FExt, FExt> solve_in_frame(const std::array<FExt, 2>& U,
                                     const std::array<FExt, 2>& V,
                                     const std::array<FExt, 2>& W);

/// Frame field factored as rational components times a single-grade scale.
/// The heavy frame computations run on the rational parts, whose common
/// denominators stay small, and dress the results back at the end.
struct ScaledField {
  std::array<RatFunc, 2> hat;
  FExt scale;
};

/// Point evaluator for the basic weight-0 scalars, used by the
/// transformation-law checks. Builds the covector chain symbolically once;
/// at a rational point each scalar is an exact rational multiple of a power
/// of the fifth root, so comparisons across charts can be made exact.
class SdPointEvaluator {
 public:
  explicit SdPointEvaluator(const OdeRf& ode);

  /// value = c * F^grade with F the real fifth root of F5.
  struct Scalar {
    Rational c;
    int grade = 0;
    double value(double root) const;
  };
  struct Values {
    Scalar I3, I6, I7, I8, L, K;
    Rational F5;
  };
  /// Throws EvalError on poles; F5 must not vanish at the point.
  Values at(const Rational& x, const Rational& y) const;

 private:
  RatFunc A_, B_, G_, H_, F5_;
  RatFunc Ax_, Ay_, Bx_, By_, Gx_, Gy_, Hx_, Hy_, F5x_, F5y_;
  RatFunc P_, Q_, R_, S_;
};

/// Exact comparison of two fifth-root multiples: c0 F0^g = c1 F1^g holds
/// for the real roots of F0^5, F1^5 iff the fifth powers agree.
bool root_multiples_equal(const SdPointEvaluator::Scalar& a,
                          const Rational& f5_a,
                          const SdPointEvaluator::Scalar& b,
                          const Rational& f5_b);

std::array<FExt, 2> assemble(const ScaledField& f);

/// Coefficients (a, b) of [V, W] = a V + b W.
std::pair<FExt, FExt> commutator_in_frame(const ScaledField& V,
                                          const ScaledField& W,
                                          const DiffContext& ctx);

}  // namespace odeinv
