#include "odeinv/invariants_bgd.hpp"

#include "odeinv/invariants_sd.hpp"

namespace odeinv {

BgdChain bgd_chain(const OdeRf& o) {
  auto dx = [&](const RatFunc& v) { return o.ctx->diff(v, Dir::X); };
  auto dy = [&](const RatFunc& v) { return o.ctx->diff(v, Dir::Y); };
  const RatFunc &P = o.P, &Q = o.Q, &R = o.R, &S = o.S;
  const Rational two(2), three(3), four(4), five(5);

  BgdChain c;
  c.alpha0 = dx(Q) - dy(P) + two * P * R - two * Q * Q;
  c.alpha1 = dx(R) - dy(Q) + P * S - Q * R;
  c.alpha2 = dx(S) - dy(R) + two * Q * S - two * R * R;

  c.beta1 = dx(c.alpha1) - dy(c.alpha0) + R * c.alpha0 - two * Q * c.alpha1 +
            P * c.alpha2;
  c.beta2 = dx(c.alpha2) - dy(c.alpha1) + S * c.alpha0 - two * R * c.alpha1 +
            Q * c.alpha2;

  c.gamma10 = dx(c.beta1) - Q * c.beta1 + P * c.beta2;
  c.gamma11 = dx(c.beta2) - R * c.beta1 + Q * c.beta2;
  c.gamma20 = dy(c.beta1) - R * c.beta1 + Q * c.beta2;
  c.gamma21 = dy(c.beta2) - S * c.beta1 + R * c.beta2;

  c.delta10 = dx(c.gamma10) - two * Q * c.gamma10 +
              P * (c.gamma20 + c.gamma11) - five * c.alpha0 * c.beta1;
  c.delta20 = dx(c.gamma20) - R * c.gamma10 + P * c.gamma21 -
              four * c.alpha1 * c.beta1 - c.alpha0 * c.beta2;
  c.delta30 = dy(c.gamma20) - S * c.gamma10 + Q * c.gamma21 -
              four * c.alpha2 * c.beta1 - c.alpha1 * c.beta2;
  c.delta11 = dx(c.gamma11) - R * c.gamma10 + P * c.gamma21 -
              c.alpha1 * c.beta1 - four * c.alpha0 * c.beta2;
  c.delta21 = dx(c.gamma21) - R * (c.gamma20 + c.gamma11) +
              two * Q * c.gamma21 - five * c.alpha1 * c.beta2;
  c.delta31 = dy(c.gamma21) - S * (c.gamma20 + c.gamma11) +
              two * R * c.gamma21 - five * c.alpha2 * c.beta2;

  c.eps10 = dx(c.delta10) - three * Q * c.delta10 +
            P * (two * c.delta20 + c.delta11) -
            Rational(12) * c.alpha0 * c.gamma10;
  c.eps20 = dy(c.delta10) - three * R * c.delta10 +
            Q * (two * c.delta20 + c.delta11) -
            Rational(12) * c.alpha1 * c.gamma10;
  c.eps11 = dx(c.delta11) - R * c.delta10 - Q * c.delta11 +
            two * P * c.delta21 - two * c.alpha1 * c.gamma10 -
            Rational(10) * c.alpha0 * c.gamma11 -
            Rational(10) * c.beta1 * c.beta1;

  c.lambda10 = dx(c.eps10) - four * Q * c.eps10 +
               P * (three * c.eps20 + c.eps11) -
               Rational(21) * c.alpha0 * c.delta10;

  c.Gamma0 = three * c.beta2 * c.gamma10 +
             c.beta1 * (c.gamma20 - four * c.gamma11);
  c.Gamma1 = c.beta2 * (four * c.gamma20 - c.gamma11) -
             three * c.beta1 * c.gamma21;

  c.J0 = c.beta2 * c.beta2 * c.gamma10 -
         c.beta1 * c.beta2 * (c.gamma20 + c.gamma11) +
         c.beta1 * c.beta1 * c.gamma21;
  c.J1 = c.beta2 * (c.delta20 - c.delta11) + c.beta1 * (c.delta21 - c.delta30) +
         Rational(7, 5) * rf_pow(c.gamma20 - c.gamma11, 2) +
         Rational(3, 5) * (c.gamma20 * c.gamma11 - c.gamma10 * c.gamma21);
  c.J2 = c.Gamma1 * (c.delta20 - c.delta11) + c.Gamma0 * (c.delta21 - c.delta30) +
         three * (c.gamma20 - c.gamma11) *
             (c.gamma10 * c.gamma21 - c.gamma20 * c.gamma11) +
         Rational(4, 3) * rf_pow(c.gamma20 - c.gamma11, 3);
  c.J3 = rf_pow(c.beta2, 3) * c.delta10 -
         c.beta1 * rf_pow(c.beta2, 2) * (two * c.delta20 + c.delta11) +
         rf_pow(c.beta1, 2) * c.beta2 * (c.delta30 + two * c.delta21) -
         rf_pow(c.beta1, 3) * c.delta31 +
         four * (c.gamma20 - c.gamma11) * c.J0;
  c.J4 = -c.beta2 * (c.beta2 * c.Gamma0 + two * c.beta1 * c.Gamma1) *
             (two * c.delta20 + c.delta11) +
         c.beta1 * (two * c.beta2 * c.Gamma0 + c.beta1 * c.Gamma1) *
             (c.delta30 + two * c.delta21) +
         three * rf_pow(c.beta2, 2) * c.Gamma1 * c.delta10 -
         three * rf_pow(c.beta1, 2) * c.Gamma0 * c.delta31 +
         Rational(66, 5) * rf_pow(c.gamma20 - c.gamma11, 2) * c.J0 +
         Rational(36, 5) *
             (c.gamma10 * c.gamma21 - c.gamma20 * c.gamma11) * c.J0;
  return c;
}

BgdOperators bgd_operators(const BgdChain& c, const OdeRf& o) {
  if (c.J0.is_zero())
    throw DegenerateError("J0 vanishes identically; not general position");
  BgdOperators ops;
  ops.field = std::make_shared<const FExtField>(-c.J0, *o.ctx);
  FExt f = FExt::root_pow(ops.field, 1);
  ops.mu1 = -f;

  // D1 = mu1^{-2} (beta2 Dx - beta1 Dy); mu1^{-2} = f^{-2}.
  FExt mu1_m2 = FExt::root_pow(ops.field, -2);
  ops.D1 = {mu1_m2 * c.beta2, mu1_m2 * (-c.beta1)};

  // D2 = J0^{-4/5} (Gamma1 Dx - Gamma0 Dy); J0^{-4/5} = (-f)^{-4} = f^{-4}.
  // This form also covers the beta1 = 0 case.
  FExt j0_m45 = FExt::root_pow(ops.field, -4);
  ops.D2 = {j0_m45 * c.Gamma1, j0_m45 * (-c.Gamma0)};

  if (!c.beta1.is_zero()) {
    // mu2 = Gamma0 beta1^{-1} J0^{-4/5}, and through it the original second
    // operator mu2 (beta2 Dx - beta1 Dy) - 3 beta1^{-1} mu1 Dx.
    FExt mu2 = j0_m45 * (c.Gamma0 / c.beta1);
    ops.mu2 = mu2;
    FExt d2x = mu2 * c.beta2 - ops.mu1 * (RatFunc(Rational(3)) / c.beta1);
    FExt d2y = mu2 * (-c.beta1);
    ops.D2_via_mu2 = std::array<FExt, 2>{d2x, d2y};
  }
  return ops;
}

BgdScalars bgd_scalars(const BgdChain& c, const BgdOperators& ops) {
  const FExtFieldPtr& fld = ops.field;
  // (J0)^{k/5} = (-f)^k reduced mod f^5 = -J0.
  auto j0_pow = [&](int k) {
    FExt p = FExt::root_pow(fld, k);
    return (k % 2 == 0) ? p : -p;
  };
  BgdScalars s;
  s.IB1 = j0_pow(-4) * c.J1;
  s.IB2 = j0_pow(-6) * c.J2;
  s.IB3 = j0_pow(-7) * c.J3;
  s.IB4 = j0_pow(-9) * c.J4;
  s.Omega1 = (s.IB1 * Rational(8) - s.IB4) * Rational(1, 5);
  s.Omega2 = s.IB3 * Rational(1, 5);
  ScaledField d1{{c.beta2, -c.beta1}, FExt::root_pow(fld, -2)};
  ScaledField d2{{c.Gamma1, -c.Gamma0}, FExt::root_pow(fld, -4)};
  std::tie(s.Omega1_comm, s.Omega2_comm) =
      commutator_in_frame(d1, d2, *ops.field->ctx);
  return s;
}

}  // namespace odeinv
