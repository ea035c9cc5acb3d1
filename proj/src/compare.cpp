#include "odeinv/compare.hpp"

#include <cmath>

#include "odeinv/ode.hpp"

namespace odeinv {

std::string Verdict::describe() const {
  switch (kind) {
    case VerdictKind::MaximalDegeneration:
      return "MaximalDegeneration";
    case VerdictKind::GeneralPosition: {
      std::string s = "GeneralPositionAt(";
      if (witness)
        s += witness->first.get_str() + "," + witness->second.get_str();
      s += ")";
      if (probabilistic) s += " [probabilistic]";
      return s;
    }
    case VerdictKind::OtherCase:
      return probabilistic ? "OtherCase [probabilistic]" : "OtherCase";
  }
  return "?";
}

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::ExactZero:
      return "exact-zero";
    case CheckStatus::NumericZero:
      return "numeric-zero";
    case CheckStatus::Failed:
      return "FAILED";
  }
  return "?";
}

namespace {

/// Numeric fallback for residuals whose atoms include elementary functions:
/// probes random rational points; |residual| must stay below tol.
bool numeric_probe_zero(const FExt& residual, uint64_t seed, double tol) {
  RationalSampler sampler(seed ^ 0x5851f42d4c957f2dull);
  int done = 0, attempts = 0;
  while (done < 20 && attempts < 400) {
    ++attempts;
    auto [px, py] = sampler.next_point();
    std::function<double(const AtomPtr&)> bind =
        [&](const AtomPtr& a) -> double {
      switch (a->kind) {
        case AtomKind::VarX:
          return px.get_d();
        case AtomKind::VarY:
          return py.get_d();
        case AtomKind::Opaque:
          throw EvalError("unbound opaque symbol");
        case AtomKind::Func: {
          double u = rf_eval_d(*a->arg, bind);
          if (a->name == "sin") return std::sin(u);
          if (a->name == "cos") return std::cos(u);
          if (a->name == "exp") return std::exp(u);
          if (a->name == "ln") {
            if (u <= 0) throw EvalError("log of nonpositive value");
            return std::log(u);
          }
          throw EvalError("unknown function");
        }
      }
      throw EvalError("unreachable");
    };
    try {
      double v = residual.eval_d(bind);
      if (!std::isfinite(v) || std::fabs(v) > tol) return false;
      ++done;
    } catch (const EvalError&) {
      continue;
    }
  }
  return done > 0;
}

bool has_func_atoms(const FExt& e) {
  for (int k = 0; k < 5; ++k)
    if (e.coeff(k).has_func_atoms()) return true;
  return e.field() && e.field()->modulus.has_func_atoms();
}

}  // namespace

IdentityReport report_zero(const std::string& name, const RatFunc& residual) {
  IdentityReport r;
  r.name = name;
  r.residual = residual.to_string();
  r.status = residual.is_zero() ? CheckStatus::ExactZero : CheckStatus::Failed;
  return r;
}

IdentityReport report_zero(const std::string& name, const FExt& residual,
                           uint64_t seed, double tol) {
  IdentityReport r;
  r.name = name;
  r.residual = residual.to_string();
  if (residual.is_zero()) {
    r.status = CheckStatus::ExactZero;
    return r;
  }
  if (has_func_atoms(residual) && numeric_probe_zero(residual, seed, tol)) {
    r.status = CheckStatus::NumericZero;
    r.tolerance = tol;
    return r;
  }
  r.status = CheckStatus::Failed;
  return r;
}

Verdict classify(const OdeCoefficients& ode,
                 std::optional<std::pair<Rational, Rational>> point,
                 uint64_t seed) {
  OdeRf o = ode_rf(ode);
  SdCovector ab = covector_alpha(o);
  Verdict v;
  if (ab.A.is_zero() && ab.B.is_zero()) {
    v.kind = VerdictKind::MaximalDegeneration;
    return v;
  }
  RatFunc f5 = pseudoscalar_F5(o, ab);
  if (f5.is_zero()) {
    v.kind = VerdictKind::OtherCase;
    return v;
  }
  bool transcendental = f5.has_func_atoms();
  auto probe = [&](const Rational& px, const Rational& py,
                   bool propagate_eval_errors) -> bool {
    auto bind = [&](const AtomPtr& a) -> Rational {
      if (a == atom_x()) return px;
      if (a == atom_y()) return py;
      throw EvalError("coefficients contain symbols beyond x, y");
    };
    std::function<double(const AtomPtr&)> bind_d =
        [&](const AtomPtr& a) -> double {
      switch (a->kind) {
        case AtomKind::VarX:
          return px.get_d();
        case AtomKind::VarY:
          return py.get_d();
        case AtomKind::Opaque:
          throw EvalError("unbound opaque symbol");
        case AtomKind::Func: {
          double u = rf_eval_d(*a->arg, bind_d);
          if (a->name == "sin") return std::sin(u);
          if (a->name == "cos") return std::cos(u);
          if (a->name == "exp") return std::exp(u);
          if (a->name == "ln") {
            if (u <= 0) throw EvalError("log of nonpositive value");
            return std::log(u);
          }
          throw EvalError("unknown function");
        }
      }
      throw EvalError("unreachable");
    };
    try {
      if (!transcendental) {
        Rational val = rf_eval(f5, bind);
        if (val != 0) {
          v.kind = VerdictKind::GeneralPosition;
          v.witness = {px, py};
          v.f5_at_witness = val;
          return true;
        }
      } else {
        double val = rf_eval_d(f5, bind_d);
        if (std::isfinite(val) && std::fabs(val) > 1e-12) {
          v.kind = VerdictKind::GeneralPosition;
          v.witness = {px, py};
          v.probabilistic = true;
          return true;
        }
      }
      return false;
    } catch (const EvalError&) {
      if (propagate_eval_errors) throw;
      return false;
    }
  };

  if (point) {
    if (probe(point->first, point->second, true)) return v;
    v.kind = VerdictKind::OtherCase;
    v.probabilistic = transcendental;
    return v;
  }
  RationalSampler sampler(seed);
  for (int i = 0; i < 100; ++i) {
    auto [px, py] = sampler.next_point();
    if (probe(px, py, false)) return v;
  }
  // F^5 is nonzero in normal form but no witness surfaced; report the
  // fallback case and flag that the verdict is probe-based.
  v.kind = VerdictKind::OtherCase;
  v.probabilistic = true;
  return v;
}

std::vector<IdentityReport> crosswalk(const SdScalars& sd,
                                      const BgdScalars& bgd,
                                      const std::array<FExt, 2>& D1,
                                      const std::array<FExt, 2>& D2,
                                      uint64_t seed, double tol) {
  std::vector<IdentityReport> out;
  auto add = [&](const std::string& name, const FExt& resid) {
    out.push_back(report_zero(name, resid, seed, tol));
  };
  add("eq_5_40_IB3_is_15_I6", bgd.IB3 - sd.I6 * Rational(15));
  add("eq_5_40_IB1_is_I3_plus_14_5_I8",
      bgd.IB1 - (sd.I3 + sd.I8 * Rational(14, 5)));
  add("eq_5_40_IB4_is_3_I3_plus_87_5_I8",
      bgd.IB4 - (sd.I3 * Rational(3) + sd.I8 * Rational(87, 5)));
  add("eq_5_41_IB2_recovery",
      bgd.IB2 - (-sd.I7 - apply_operator(D1, sd.I8) * Rational(3) +
                 apply_operator(D2, sd.I6) * Rational(15) +
                 (sd.I8 * Rational(24) + sd.I3 * Rational(15)) * sd.I6));
  add("eq_5_42_I6_from_IB3", sd.I6 - bgd.IB3 * Rational(1, 15));
  add("eq_5_42_I3_from_IB1_IB4",
      sd.I3 - (bgd.IB1 * Rational(29, 15) - bgd.IB4 * Rational(14, 45)));
  add("eq_5_42_I8_from_IB1_IB4",
      sd.I8 - (bgd.IB4 * Rational(1, 9) - bgd.IB1 * Rational(1, 3)));
  add("eq_5_44_I7_recovery",
      sd.I7 - (-bgd.IB2 - apply_operator(D1, bgd.IB4) * Rational(1, 3) +
               apply_operator(D1, bgd.IB1) + apply_operator(D2, bgd.IB3) +
               (bgd.IB1 * Rational(21) - bgd.IB4 * Rational(2)) * bgd.IB3 *
                   Rational(1, 15)));
  // I2 plays no role in the translation; assert its fixed value alongside.
  add("crosswalk_I2_independent",
      sd.I2 - FExt(sd.I2.field(), RatFunc(Rational(1, 3))));
  return out;
}

std::vector<IdentityReport> verify_identities(const OdeCoefficients& ode,
                                              uint64_t seed, double tol) {
  std::vector<IdentityReport> out;
  OdeRf o = ode_rf(ode);
  SdCovector ab = covector_alpha(o);
  SdCovectorBeta gh = covector_beta(o, ab);
  RatFunc f5 = pseudoscalar_F5(o, ab);
  BgdChain chain = bgd_chain(o);

  out.push_back(report_zero("lemma_3_2_beta1_is_A", chain.beta1 - ab.A));
  out.push_back(report_zero("lemma_3_2_beta2_is_B", chain.beta2 - ab.B));
  out.push_back(report_zero("lemma_3_3_J0_is_minus_F5", chain.J0 + f5));
  out.push_back(
      report_zero("lemma_3_5_Gamma0_is_minus_H", chain.Gamma0 + gh.H));
  out.push_back(report_zero("lemma_3_5_Gamma1_is_G", chain.Gamma1 - gh.G));
  out.push_back(report_zero(
      "eq_3_25_three_J0",
      Rational(3) * chain.J0 -
          (chain.beta2 * chain.Gamma0 - chain.beta1 * chain.Gamma1)));
  out.push_back(report_zero(
      "eq_3_25_sd_form_3F5_is_BH_plus_AG",
      Rational(3) * f5 - (ab.B * gh.H + ab.A * gh.G)));

  if (f5.is_zero()) return out;  // the rest needs general position

  SdCore core = frame_and_connection(o);
  SdScalars sd = scalars_explicit(core, o);
  SdScalars sd_conn = scalars_via_connection(core, o);
  BgdOperators ops = bgd_operators(chain, o);
  BgdScalars bgd = bgd_scalars(chain, ops);

  auto add = [&](const std::string& name, const FExt& resid) {
    out.push_back(report_zero(name, resid, seed, tol));
  };

  add("eq_4_9_vs_4_10_I6_routes", sd.I6 - sd.I6_alt);
  add("theorem_3_3_D1_is_X_comp1", ops.D1[0] - core.X[0]);
  add("theorem_3_3_D1_is_X_comp2", ops.D1[1] - core.X[1]);
  add("theorem_3_3_D2_is_Y_comp1", ops.D2[0] - core.Y[0]);
  add("theorem_3_3_D2_is_Y_comp2", ops.D2[1] - core.Y[1]);
  if (ops.D2_via_mu2) {
    add("eq_3_22_vs_3_26_D2_routes_comp1", (*ops.D2_via_mu2)[0] - ops.D2[0]);
    add("eq_3_22_vs_3_26_D2_routes_comp2", (*ops.D2_via_mu2)[1] - ops.D2[1]);
  }
  // mu1 = -F: both sides are grade-1 elements of the same extension.
  add("lemma_3_4_mu1_is_minus_F",
      ops.mu1 + FExt::root_pow(core.field, 1));

  add("eq_4_1_I1_is_minus_4_I6", sd.I1 + sd.I6 * Rational(4));
  add("eq_4_1_I2_is_one_third",
      sd.I2 - FExt(core.field, RatFunc(Rational(1, 3))));
  add("eq_4_1_I4_is_4_I6", sd.I4 - sd.I6 * Rational(4));
  add("eq_4_1_I5_is_minus_I8", sd.I5 + sd.I8);
  add("eq_4_2_I5_is_I3_minus_L", sd.I5 - (sd.I3 - sd.L));
  add("eq_4_2_I6_is_minus_I1_plus_K", sd.I6 - (-sd.I1 + sd.K));
  add("eq_4_3_L_is_I3_plus_I8", sd.L - (sd.I3 + sd.I8));
  add("eq_4_3_K_is_minus_3_I6", sd.K + sd.I6 * Rational(3));

  // The connection route is the independent oracle for every scalar.
  add("oracle_connection_I1", sd_conn.I1 - sd.I1);
  add("oracle_connection_I2", sd_conn.I2 - sd.I2);
  add("oracle_connection_I3", sd_conn.I3 - sd.I3);
  add("oracle_connection_I4", sd_conn.I4 - sd.I4);
  add("oracle_connection_I5", sd_conn.I5 - sd.I5);
  add("oracle_connection_I6", sd_conn.I6 - sd.I6);
  add("oracle_connection_I7", sd_conn.I7 - sd.I7);
  add("oracle_connection_I8", sd_conn.I8 - sd.I8);
  add("oracle_connection_L", sd_conn.L - sd.L);
  add("oracle_connection_K", sd_conn.K - sd.K);

  // Commutator definition of L, K: [X,Y] - (L X - K Y) = 0.
  auto c = commutator(core.X, core.Y);
  add("eq_5_3_commutator_comp1", c[0] - (sd.L * core.X[0] - sd.K * core.Y[0]));
  add("eq_5_3_commutator_comp2", c[1] - (sd.L * core.X[1] - sd.K * core.Y[1]));

  add("eq_5_46_Omega1_is_L", bgd.Omega1_comm - sd.L);
  add("eq_5_46_Omega2_is_minus_K", bgd.Omega2_comm + sd.K);
  add("eq_5_47_Omega1_closed_form", bgd.Omega1 - bgd.Omega1_comm);
  add("eq_5_47_Omega2_closed_form", bgd.Omega2 - bgd.Omega2_comm);

  auto cw = crosswalk(sd, bgd, ops.D1, ops.D2, seed, tol);
  out.insert(out.end(), cw.begin(), cw.end());
  return out;
}

namespace {

double eval_rf_at(const RatFunc& rf, double x, double y) {
  return rf_eval_d(rf, [&](const AtomPtr& a) -> double {
    if (a == atom_x()) return x;
    if (a == atom_y()) return y;
    throw EvalError("unbound symbol");
  });
}

}  // namespace

std::vector<IdentityReport> check_transformation_laws(
    const OdeCoefficients& ode, const PointTransformation& t, int points,
    uint64_t seed, double tol) {
  validate_transformation(t, seed, 20, tol);
  std::vector<IdentityReport> out;

  OdeCoefficients pulled = pullback(ode, t);
  Verdict v0 = classify(ode, std::nullopt, seed);
  Verdict v1 = classify(pulled, std::nullopt, seed);
  {
    IdentityReport r;
    r.name = "classification_preserved";
    r.status =
        v0.kind == v1.kind ? CheckStatus::NumericZero : CheckStatus::Failed;
    r.tolerance = tol;
    r.residual = v0.describe() + " vs " + v1.describe();
    out.push_back(r);
  }

  OdeRf o0 = ode_rf(ode), o1 = ode_rf(pulled);
  SdCovector ab0 = covector_alpha(o0), ab1 = covector_alpha(o1);
  SdCovectorBeta gh0 = covector_beta(o0, ab0), gh1 = covector_beta(o1, ab1);
  RatFunc f50 = pseudoscalar_F5(o0, ab0), f51 = pseudoscalar_F5(o1, ab1);
  bool general = !f50.is_zero();
  std::optional<SdPointEvaluator> s0, s1;
  if (general) {
    s0.emplace(o0);
    s1.emplace(o1);
  }

  TransitionMatrices m = jacobians(t);
  RatFunc fx = to_ratfunc(t.fwd_x), fy = to_ratfunc(t.fwd_y);
  std::array<std::array<RatFunc, 2>, 2> T;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) T[i][j] = to_ratfunc(m.Tmat[i][j]);

  // Sample points are rational, the transition matrix and the chain values
  // there are rational, and each scalar is a rational multiple of a power of
  // the fifth root; every law below is checked exactly, which is stronger
  // than the required tolerance.
  RationalSampler sampler(seed ^ 0x7c0de5eedull);
  int ok_scalars = 0, ok_f5 = 0, ok_cov1 = 0, ok_cov3 = 0, tried = 0;
  int attempts = 0;
  while (tried < points && attempts < points * 50) {
    ++attempts;
    auto [px, py] = sampler.next_point();
    try {
      auto bind0 = [&](const AtomPtr& a) -> Rational {
        if (a == atom_x()) return px;
        if (a == atom_y()) return py;
        throw EvalError("unbound symbol");
      };
      Rational xt = rf_eval(fx, bind0), yt = rf_eval(fy, bind0);
      auto bind1 = [&](const AtomPtr& a) -> Rational {
        if (a == atom_x()) return xt;
        if (a == atom_y()) return yt;
        throw EvalError("unbound symbol");
      };
      Rational Tv[2][2];
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Tv[i][j] = rf_eval(T[i][j], bind0);
      Rational det = Tv[0][0] * Tv[1][1] - Tv[0][1] * Tv[1][0];
      if (det == 0) continue;

      if (general) {
        Rational f5v = rf_eval(f50, bind0);
        Rational f5t = rf_eval(f51, bind1);
        if (f5v == 0 || f5t == 0) continue;  // degeneration locus
        SdPointEvaluator::Values v0 = s0->at(px, py);
        SdPointEvaluator::Values v1 = s1->at(xt, yt);
        bool scal_ok =
            root_multiples_equal(v0.I3, f5v, v1.I3, f5t) &&
            root_multiples_equal(v0.I6, f5v, v1.I6, f5t) &&
            root_multiples_equal(v0.I7, f5v, v1.I7, f5t) &&
            root_multiples_equal(v0.I8, f5v, v1.I8, f5t) &&
            root_multiples_equal(v0.L, f5v, v1.L, f5t) &&
            root_multiples_equal(v0.K, f5v, v1.K, f5t);
        if (scal_ok) ++ok_scalars;
        Rational det5 = det * det;
        det5 = det5 * det5 * det;
        if (f5v == det5 * f5t) ++ok_f5;
      } else {
        ++ok_scalars;
        ++ok_f5;
      }

      // Covector law: untilded_j = detT^w sum_q T^q_j tilde_q.
      auto check_cov = [&](const RatFunc& u1, const RatFunc& u2,
                           const RatFunc& w1, const RatFunc& w2, int weight) {
        Rational t1 = rf_eval(w1, bind1), t2 = rf_eval(w2, bind1);
        Rational wf(1);
        for (int i = 0; i < weight; ++i) wf *= det;
        Rational want1 = wf * (Tv[0][0] * t1 + Tv[1][0] * t2);
        Rational want2 = wf * (Tv[0][1] * t1 + Tv[1][1] * t2);
        return rf_eval(u1, bind0) == want1 && rf_eval(u2, bind0) == want2;
      };
      if (check_cov(ab0.A, ab0.B, ab1.A, ab1.B, 1)) ++ok_cov1;
      if (check_cov(-gh0.H, gh0.G, -gh1.H, gh1.G, 3)) ++ok_cov3;
      ++tried;
    } catch (const EvalError&) {
      continue;
    }
  }

  auto add = [&](const std::string& name, int ok) {
    IdentityReport r;
    r.name = name;
    r.tolerance = tol;
    r.status = (tried > 0 && ok == tried) ? CheckStatus::NumericZero
                                          : CheckStatus::Failed;
    r.residual = std::to_string(ok) + "/" + std::to_string(tried) +
                 " points, exact";
    out.push_back(r);
  };
  add("scalar_invariance_at_matched_points", ok_scalars);
  add("pseudoscalar_weight5_scaling", ok_f5);
  add("covector_law_A_B_weight1", ok_cov1);
  add("covector_law_mH_G_weight3", ok_cov3);
  return out;
}

}  // namespace odeinv
