#pragma once

#include <optional>

#include "odeinv/fext.hpp"
#include "odeinv/ode.hpp"

namespace odeinv {

/// The full tower of relative-invariant expressions of orders one to six,
/// computed literally in dependency order, plus the Gamma pair and the
/// J-block built from them.
struct BgdChain {
  RatFunc alpha0, alpha1, alpha2;
  RatFunc beta1, beta2;
  RatFunc gamma10, gamma11, gamma20, gamma21;
  RatFunc delta10, delta20, delta30, delta11, delta21, delta31;
  RatFunc eps10, eps20, eps11;
  RatFunc lambda10;
  RatFunc Gamma0, Gamma1;
  RatFunc J0, J1, J2, J3, J4;
};

BgdChain bgd_chain(const OdeRf& ode);

/// mu1 and the two invariant-differentiation operators. The fifth root of J0
/// is realized as -f in the extension with f^5 = -J0, so every fractional
/// power of J0 is ring-exact.
struct BgdOperators {
  FExtFieldPtr field;  // modulus -J0 (= F^5)
  FExt mu1;            // = -f
  std::array<FExt, 2> D1, D2;
  /// mu2 and the alternative route to D2 through it; absent when beta1
  /// vanishes identically (the formula is inapplicable there).
  std::optional<FExt> mu2;
  std::optional<std::array<FExt, 2>> D2_via_mu2;
};

/// Requires J0 not identically zero.
BgdOperators bgd_operators(const BgdChain& chain, const OdeRf& ode);

struct BgdScalars {
  FExt IB1, IB2, IB3, IB4;
  FExt Omega1, Omega2;            // from the printed closed forms
  FExt Omega1_comm, Omega2_comm;  // from solving the commutator relation
};

BgdScalars bgd_scalars(const BgdChain& chain, const BgdOperators& ops);

}  // namespace odeinv
