#include "odeinv/special.hpp"

namespace odeinv {

RewriteDiff::RewriteDiff(RatFunc r20, RatFunc r11, std::optional<RatFunc> s30)
    : r20_(std::move(r20)), r11_(std::move(r11)), s30_(std::move(s30)) {}

RatFunc RewriteDiff::reduce(const AtomPtr& a) const {
  if (a->kind != AtomKind::Opaque) return RatFunc::from_atom(a);
  if (a->name == "A") return RatFunc();
  bool constrained_r = a->name == "R" && (a->px >= 2 || (a->px == 1 && a->py >= 1));
  bool constrained_s = a->name == "S" && s30_ && a->px >= 3;
  if (!constrained_r && !constrained_s) return RatFunc::from_atom(a);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(a.get());
    if (it != memo_.end()) return it->second;
  }
  RatFunc result;
  if (a->name == "R") {
    if (a->px >= 3)
      result = diff(reduce(atom_opaque("R", a->px - 1, a->py)), Dir::X);
    else if (a->px == 2 && a->py >= 1)
      result = diff(reduce(atom_opaque("R", 2, a->py - 1)), Dir::Y);
    else if (a->px == 2)
      result = r20_;
    else if (a->py >= 2)
      result = diff(reduce(atom_opaque("R", 1, a->py - 1)), Dir::Y);
    else
      result = r11_;
  } else {
    if (a->px >= 4)
      result = diff(reduce(atom_opaque("S", a->px - 1, a->py)), Dir::X);
    else if (a->py >= 1)
      result = diff(reduce(atom_opaque("S", 3, a->py - 1)), Dir::Y);
    else
      result = *s30_;
  }
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(a.get(), result);
  return result;
}

RatFunc RewriteDiff::atom_derivative_impl(const AtomPtr& a, Dir d) const {
  if (a->kind == AtomKind::Opaque)
    return reduce(atom_opaque(a->name, a->px + (d == Dir::X ? 1 : 0),
                              a->py + (d == Dir::Y ? 1 : 0)));
  return PlainDiff::instance().atom_derivative(a, d);
}

namespace {

RatFunc at(const std::string& name, int px, int py) {
  return RatFunc::from_atom(atom_opaque(name, px, py));
}

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// The printed reduced forms of section 5, transcribed once.
struct Targets {
  // free data and shorthand derivatives
  RatFunc B = at("B", 0, 0), B10 = at("B", 1, 0), B01 = at("B", 0, 1);
  RatFunc B20 = at("B", 2, 0), B11 = at("B", 1, 1), B02 = at("B", 0, 2);
  RatFunc B21 = at("B", 2, 1), B12 = at("B", 1, 2);
  RatFunc F = at("F", 0, 0), F10 = at("F", 1, 0), F01 = at("F", 0, 1);
  RatFunc F20 = at("F", 2, 0), F02 = at("F", 0, 2);
  RatFunc R = at("R", 0, 0), R10 = at("R", 1, 0), R01 = at("R", 0, 1);
  RatFunc S = at("S", 0, 0), S10 = at("S", 1, 0), S01 = at("S", 0, 1);
  RatFunc S20 = at("S", 2, 0);

  RatFunc F2 = rf_pow(F, 2), F3 = rf_pow(F, 3), F4 = rf_pow(F, 4),
          F5 = rf_pow(F, 5);
  RatFunc B2 = rf_pow(B, 2), B3 = rf_pow(B, 3), B4 = rf_pow(B, 4),
          B5 = rf_pow(B, 5);

  // (5.18), (5.19)
  RatFunc P10 = (q(3) * F5 * B10 - q(5) * B * F4 * F10) / B4;
  RatFunc P01 = (q(3) * F5 * B01 - q(5) * B * F4 * F01) / B4;
  RatFunc Q10 = (B * B20 - B10 * B10) / (q(3) * B2);
  RatFunc Q01 = (B * B11 - B10 * B01) / (q(3) * B2);

  // (5.22)-(5.24); the lower-order denominators follow from differentiating
  // (5.19) and are confirmed by the terms of (5.25).
  RatFunc P02 = q(3) * F5 * B02 / B4 - q(5) * F4 * F02 / B3 -
                q(12) * F5 * B01 * B01 / B5 +
                q(30) * F4 * F01 * B01 / B4 - q(20) * F3 * F01 * F01 / B3;
  RatFunc Q11 = B21 / (q(3) * B) - B01 * B20 / (q(3) * B2) -
                q(2) * B10 * B11 / (q(3) * B2) +
                q(2) * B01 * B10 * B10 / (q(3) * B3);
  RatFunc Q02 = B12 / (q(3) * B) - B10 * B02 / (q(3) * B2) -
                q(2) * B01 * B11 / (q(3) * B2) +
                q(2) * B10 * B01 * B01 / (q(3) * B3);

  // (5.25)
  RatFunc R20 = (B10 / B) * R10 - (q(3) * F5 / B3) * R01 +
                (q(9) * F5 * B01 / B4 - q(15) * F4 * F01 / B3) * R +
                (q(2) * F5 / B3) * S10 +
                (q(5) * F4 * F10 / B3 - q(3) * F5 * B10 / B4) * S +
                q(2) * B21 / (q(3) * B) - q(2) * B01 * B20 / (q(3) * B2) -
                q(2) * B10 * B11 / B2 - q(3) * F5 * B02 / B4 +
                q(5) * F4 * F02 / B3 + q(2) * B01 * B10 * B10 / B3 +
                q(20) * F3 * F01 * F01 / B3 - q(30) * F4 * F01 * B01 / B4 +
                q(12) * F5 * B01 * B01 / B5;

  // (5.26); the R coefficient's first term is the mixed derivative B_{1.1}
  // forced by 3R*Q_{0.1}/2, and the next-to-last denominator is B^3.
  RatFunc R11 = q(1, 2) * S20 - q(3) * R * R10 + (B10 / (q(2) * B)) * S10 +
                (F5 / (q(2) * B3)) * S01 +
                (B11 / (q(2) * B) - B01 * B10 / (q(2) * B2)) * R +
                (B20 / (q(2) * B) - B10 * B10 / (q(2) * B2) -
                 q(3) * F5 * B01 / B4 + q(5) * F4 * F01 / B3) *
                    S +
                B12 / (q(6) * B) - B01 * B11 / (q(3) * B2) -
                B10 * B02 / (q(6) * B2) + B10 * B01 * B01 / (q(3) * B3) -
                B / q(2);

  // (5.29)
  RatFunc alpha0 = B20 / (q(3) * B) - q(5) * B10 * B10 / (q(9) * B2) -
                   q(3) * F5 * B01 / B4 + q(5) * F4 * F01 / B3 -
                   (q(2) * F5 / B3) * R;
  RatFunc alpha1 = -B11 / (q(3) * B) + B01 * B10 / (q(3) * B2) + R10 -
                   (B10 / (q(3) * B)) * R - (F5 / B3) * S;
  RatFunc alpha2 = S10 - R01 - q(2) * R * R + (q(2) * B10 / (q(3) * B)) * S;

  // (5.31)
  RatFunc gamma10 = -F5 / B2;
  RatFunc gamma11 = q(4, 3) * B10;
  RatFunc gamma20 = q(1, 3) * B10;
  RatFunc gamma21 = B01 + B * R;

  // (5.32)
  RatFunc delta10 = F5 * B10 / B3 - q(5) * F4 * F10 / B2;
  RatFunc delta20 = q(5) * B10 * B10 / (q(9) * B) + q(2) * F5 * B01 / B3 -
                    q(5) * F4 * F01 / B2 + (q(2) * F5 / B2) * R;
  RatFunc delta30 = q(2, 3) * B11 - B * R10 + (q(2) * B10 / q(3)) * R +
                    (q(2) * F5 / B2) * S;
  RatFunc delta11 = q(20) * B10 * B10 / (q(9) * B) + q(11) * F5 * B01 / B3 -
                    q(20) * F4 * F01 / B2 + (q(8) * F5 / B2) * R;
  RatFunc delta21 = q(8, 3) * B11 - B01 * B10 / B - q(4) * B * R10 +
                    (q(5) * B10 / q(3)) * R + (q(5) * F5 / B2) * S;
  RatFunc delta31 = B02 + q(6) * B * R01 - q(5) * B * S10 + q(12) * B * R * R +
                    q(3) * B01 * R - q(5) * B10 * S;

  // (5.33)
  RatFunc Gamma0 = -q(3) * F5 / B;
  RatFunc Gamma1 = RatFunc();

  // (5.12), (5.13)
  RatFunc H = q(3) * F5 / B;
  RatFunc u = B / F2;
  RatFunc v = q(3) * F / B;

  // (5.14)
  RatFunc L = (q(6) * B * F01 - q(3) * B01 * F) / B2;
  RatFunc K = (F * B10 - B * F10) / F3;

  // (5.17); the I3 numerator carries 3FR, as forced by L = I3 + I8 and the
  // reduction of the closed form.
  RatFunc I1 = (q(4) * F * B10 - q(4) * B * F10) / (q(3) * F3);
  RatFunc I2 = RatFunc(q(1, 3));
  RatFunc I3 = (F01 + q(3) * F * R) / B;
  RatFunc I4 = (q(4) * B * F10 - q(4) * F * B10) / (q(3) * F3);
  RatFunc I5 = (q(3) * F * B01 + q(3) * F * B * R - q(5) * B * F01) / B2;
  RatFunc I6 = (B * F10 - F * B10) / (q(3) * F3);
  RatFunc I7 = q(9) * F4 * S / B3;
  RatFunc I8 = (q(5) * B * F01 - q(3) * F * B01 - q(3) * F * B * R) / B2;

  // (5.36)-(5.39)
  RatFunc IB1 = q(15) * F01 / B - q(42) * F * B01 / (q(5) * B2) -
                q(27) * F * R / (q(5) * B);
  RatFunc IB2 = -q(6) * B11 / (F * B) + q(6) * B10 * B01 / (F * B2) +
                q(9) * R10 / F - q(9) * F4 * S / B3;
  RatFunc IB3 = -q(5) * B10 / F2 + q(5) * B * F10 / F3;
  RatFunc IB4 = q(90) * F01 / B - q(261) * F * B01 / (q(5) * B2) -
                q(216) * F * R / (q(5) * B);
};

}  // namespace

SpecialFrame build_special() {
  Targets t;
  SpecialFrame frame;
  frame.B = t.B;
  frame.F = t.F;
  frame.R = t.R;
  frame.S = t.S;
  frame.P = -t.F5 / t.B3;
  frame.Q = t.B10 / (q(3) * t.B);
  frame.u = t.u;
  frame.v = t.v;

  // The unconstrained covector formulas, on the chart's coefficient data.
  OdeRf plain{frame.P, frame.Q, frame.R, frame.S, &PlainDiff::instance()};
  SdCovector ab = covector_alpha(plain);

  // A = 0 resolves R_{2.0}; the B-formula equals the free datum B and
  // resolves R_{1.1}.
  frame.R20 = to_ratfunc(
      solve_linear_for(to_expr(ab.A), Expr::number(0), OpaqueSym{"R", 2, 0}));
  frame.R11 = to_ratfunc(solve_linear_for(
      to_expr(ab.B), to_expr(t.B), OpaqueSym{"R", 1, 1}));
  frame.ctx_pre = std::make_shared<const RewriteDiff>(frame.R20, frame.R11,
                                                      std::nullopt);

  // Equality of the two routes to R_{2.1} forces one condition, resolved
  // with respect to S_{3.0}.
  RatFunc resid = frame.ctx_pre->diff(frame.R20, Dir::Y) -
                  frame.ctx_pre->diff(frame.R11, Dir::X);
  frame.S30 = to_ratfunc(
      solve_linear_for(to_expr(resid), Expr::number(0), OpaqueSym{"S", 3, 0}));
  frame.ctx = std::make_shared<const RewriteDiff>(frame.R20, frame.R11,
                                                  frame.S30);
  frame.ode = OdeRf{frame.P, frame.Q, frame.R, frame.S, frame.ctx.get()};

  const DiffContext& ctx = *frame.ctx;
  auto add = [&](const std::string& name, const RatFunc& resid2) {
    frame.build_checks.push_back(report_zero(name, resid2));
  };
  add("eq_5_18_P10", ctx.diff(frame.P, Dir::X) - t.P10);
  add("eq_5_18_P01", ctx.diff(frame.P, Dir::Y) - t.P01);
  add("eq_5_19_Q10", ctx.diff(frame.Q, Dir::X) - t.Q10);
  add("eq_5_19_Q01", ctx.diff(frame.Q, Dir::Y) - t.Q01);
  add("eq_5_22_P02", ctx.diff(frame.P, 0, 2) - t.P02);
  add("eq_5_23_Q11", ctx.diff(frame.Q, 1, 1) - t.Q11);
  add("eq_5_24_Q02", ctx.diff(frame.Q, 0, 2) - t.Q02);
  add("eq_5_25_R20", frame.R20 - t.R20);
  add("eq_5_26_R11", frame.R11 - t.R11);
  // Differentiating the P and Q cascade produces no further conditions.
  add("pq_cascade_mixed_partials_P",
      ctx.diff(ctx.diff(frame.P, Dir::X), Dir::Y) -
          ctx.diff(ctx.diff(frame.P, Dir::Y), Dir::X));
  add("pq_cascade_mixed_partials_Q",
      ctx.diff(ctx.diff(frame.Q, Dir::X), Dir::Y) -
          ctx.diff(ctx.diff(frame.Q, Dir::Y), Dir::X));
  return frame;
}

CompatibilityCheck compatibility_condition(const SpecialFrame& frame) {
  CompatibilityCheck c;
  c.residual_before = frame.ctx_pre->diff(frame.R20, Dir::Y) -
                      frame.ctx_pre->diff(frame.R11, Dir::X);
  c.residual_after =
      frame.ctx->diff(frame.R20, Dir::Y) - frame.ctx->diff(frame.R11, Dir::X);
  return c;
}

std::vector<IdentityReport> verify_reduced_forms(const SpecialFrame& frame) {
  Targets t;
  std::vector<IdentityReport> out;
  auto add = [&](const std::string& name, const RatFunc& resid) {
    out.push_back(report_zero(name, resid));
  };

  const OdeRf& o = frame.ode;
  SdCovector ab = covector_alpha(o);
  SdCovectorBeta gh = covector_beta(o, ab);
  RatFunc f5 = pseudoscalar_F5(o, ab);
  add("eq_5_11_A_vanishes", ab.A);
  add("eq_5_30_B_is_free_datum", ab.B - t.B);
  add("eq_5_11_G_vanishes", gh.G);
  add("eq_5_12_H", gh.H - t.H);
  add("eq_5_12_F5", f5 - t.F5);

  BgdChain chain = bgd_chain(o);
  add("eq_5_29_alpha0", chain.alpha0 - t.alpha0);
  add("eq_5_29_alpha1", chain.alpha1 - t.alpha1);
  add("eq_5_29_alpha2", chain.alpha2 - t.alpha2);
  add("eq_5_30_beta1", chain.beta1);
  add("eq_5_30_beta2", chain.beta2 - t.B);
  add("eq_5_31_gamma10", chain.gamma10 - t.gamma10);
  add("eq_5_31_gamma11", chain.gamma11 - t.gamma11);
  add("eq_5_31_gamma20", chain.gamma20 - t.gamma20);
  add("eq_5_31_gamma21", chain.gamma21 - t.gamma21);
  add("eq_5_32_delta10", chain.delta10 - t.delta10);
  add("eq_5_32_delta20", chain.delta20 - t.delta20);
  add("eq_5_32_delta30", chain.delta30 - t.delta30);
  add("eq_5_32_delta11", chain.delta11 - t.delta11);
  add("eq_5_32_delta21", chain.delta21 - t.delta21);
  add("eq_5_32_delta31", chain.delta31 - t.delta31);
  add("eq_5_33_Gamma0", chain.Gamma0 - t.Gamma0);
  add("eq_5_33_Gamma1", chain.Gamma1 - t.Gamma1);
  add("eq_3_15_J0_special", chain.J0 + t.F5);

  SdCore core = frame_and_connection(o);
  auto down = [&](const FExt& e) { return e.eval_root(t.F); };

  SdScalars sd = scalars_explicit(core, o);
  add("eq_5_17_I1", down(sd.I1) - t.I1);
  add("eq_5_17_I2", down(sd.I2) - t.I2);
  add("eq_5_17_I3", down(sd.I3) - t.I3);
  add("eq_5_17_I4", down(sd.I4) - t.I4);
  add("eq_5_17_I5", down(sd.I5) - t.I5);
  add("eq_5_17_I6", down(sd.I6) - t.I6);
  add("eq_5_17_I6_alt_route", down(sd.I6_alt) - t.I6);
  add("eq_5_17_I7", down(sd.I7) - t.I7);
  add("eq_5_17_I8", down(sd.I8) - t.I8);
  add("eq_5_14_L", down(sd.L) - t.L);
  add("eq_5_14_K", down(sd.K) - t.K);

  SdScalars sdc = scalars_via_connection(core, o);
  add("eq_5_17_I1_via_connection", down(sdc.I1) - t.I1);
  add("eq_5_17_I2_via_connection", down(sdc.I2) - t.I2);
  add("eq_5_17_I3_via_connection", down(sdc.I3) - t.I3);
  add("eq_5_17_I4_via_connection", down(sdc.I4) - t.I4);
  add("eq_5_17_I5_via_connection", down(sdc.I5) - t.I5);
  add("eq_5_17_I6_via_connection", down(sdc.I6) - t.I6);
  add("eq_5_17_I7_via_connection", down(sdc.I7) - t.I7);
  add("eq_5_17_I8_via_connection", down(sdc.I8) - t.I8);
  add("eq_5_14_L_via_connection", down(sdc.L) - t.L);
  add("eq_5_14_K_via_connection", down(sdc.K) - t.K);

  BgdOperators ops = bgd_operators(chain, o);
  add("eq_5_35_D1_comp1", down(ops.D1[0]) - t.u);
  add("eq_5_35_D1_comp2", down(ops.D1[1]));
  add("eq_5_35_D2_comp1", down(ops.D2[0]));
  add("eq_5_35_D2_comp2", down(ops.D2[1]) - t.v);
  {
    IdentityReport r;
    r.name = "remark_1_mu2_inapplicable_when_beta1_vanishes";
    r.status = ops.mu2.has_value() ? CheckStatus::Failed : CheckStatus::ExactZero;
    r.residual = ops.mu2 ? "mu2 unexpectedly defined" : "0";
    out.push_back(r);
  }

  BgdScalars bgd = bgd_scalars(chain, ops);
  add("eq_5_36_IB1", down(bgd.IB1) - t.IB1);
  add("eq_5_37_IB2", down(bgd.IB2) - t.IB2);
  add("eq_5_38_IB3", down(bgd.IB3) - t.IB3);
  add("eq_5_39_IB4", down(bgd.IB4) - t.IB4);

  // (5.10): the frame scalings satisfy u v_x = -K v and v u_y = -L u.
  const DiffContext& ctx = *frame.ctx;
  add("eq_5_10_u_vx", t.u * ctx.diff(t.v, Dir::X) + t.K * t.v);
  add("eq_5_10_v_uy", t.v * ctx.diff(t.u, Dir::Y) + t.L * t.u);
  return out;
}

std::vector<IdentityReport> crosscheck_theorems(const SpecialFrame& frame) {
  Targets t;
  std::vector<IdentityReport> out;
  auto add = [&](const std::string& name, const RatFunc& resid) {
    out.push_back(report_zero(name, resid));
  };
  const DiffContext& ctx = *frame.ctx;
  // Invariant differentiation in the straightened shape (5.35).
  auto D1 = [&](const RatFunc& s) { return t.u * ctx.diff(s, Dir::X); };
  auto D2 = [&](const RatFunc& s) { return t.v * ctx.diff(s, Dir::Y); };

  add("eq_5_40_IB3_is_15_I6", t.IB3 - q(15) * t.I6);
  add("eq_5_40_IB1_is_I3_plus_14_5_I8", t.IB1 - (t.I3 + q(14, 5) * t.I8));
  add("eq_5_40_IB4_is_3_I3_plus_87_5_I8",
      t.IB4 - (q(3) * t.I3 + q(87, 5) * t.I8));
  add("eq_5_41_IB2_recovery",
      t.IB2 - (-t.I7 - q(3) * D1(t.I8) + q(15) * D2(t.I6) +
               (q(24) * t.I8 + q(15) * t.I3) * t.I6));
  add("eq_5_42_I6_from_IB3", t.I6 - t.IB3 / q(15));
  add("eq_5_42_I3_from_IB1_IB4",
      t.I3 - (q(29, 15) * t.IB1 - q(14, 45) * t.IB4));
  add("eq_5_42_I8_from_IB1_IB4", t.I8 - (t.IB4 / q(9) - t.IB1 / q(3)));
  add("eq_5_44_I7_recovery",
      t.I7 - (-t.IB2 - q(1, 3) * D1(t.IB4) + D1(t.IB1) + D2(t.IB3) +
              q(1, 15) * (q(21) * t.IB1 - q(2) * t.IB4) * t.IB3));

  // (5.45)-(5.47): commutator coefficients of the straightened operators.
  RatFunc omega1_comm = -t.v * ctx.diff(t.u, Dir::Y) / t.u;
  RatFunc omega2_comm = t.u * ctx.diff(t.v, Dir::X) / t.v;
  add("eq_5_46_Omega1_is_L", omega1_comm - t.L);
  add("eq_5_46_Omega2_is_minus_K", omega2_comm + t.K);
  add("eq_5_47_Omega1_closed_form",
      q(1, 5) * (q(8) * t.IB1 - t.IB4) - omega1_comm);
  add("eq_5_47_Omega2_closed_form", q(1, 5) * t.IB3 - omega2_comm);

  CompatibilityCheck compat = compatibility_condition(frame);
  IdentityReport r;
  r.name = "eq_5_27_5_28_compatibility_resolves_S30";
  r.status = compat.passed() ? CheckStatus::ExactZero : CheckStatus::Failed;
  r.residual = compat.residual_after.to_string();
  out.push_back(r);
  return out;
}

}  // namespace odeinv
