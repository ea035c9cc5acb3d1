#include "doctest.h"
#include "odeinv/corpus.hpp"
#include "odeinv/invariants_bgd.hpp"
#include "odeinv/invariants_sd.hpp"

using namespace odeinv;

namespace {

RatFunc rf(const char* s) { return to_ratfunc(parse(s)); }

}  // namespace

TEST_CASE("chain vanishes on the trivial equation") {
  auto chain = bgd_chain(ode_rf(fixed_zero_ode()));
  CHECK(chain.alpha0.is_zero());
  CHECK(chain.beta1.is_zero());
  CHECK(chain.beta2.is_zero());
  CHECK(chain.gamma10.is_zero());
  CHECK(chain.delta31.is_zero());
  CHECK(chain.eps11.is_zero());
  CHECK(chain.lambda10.is_zero());
  CHECK(chain.Gamma0.is_zero());
  CHECK(chain.J0.is_zero());
  CHECK(chain.J4.is_zero());
}

TEST_CASE("chain values on the corpus equation") {
  auto o = ode_rf(fixed_px2_ode());
  auto chain = bgd_chain(o);
  CHECK(chain.beta1 == rf("4*x"));
  CHECK(chain.beta2 == rf("2"));
  CHECK(chain.Gamma0 == rf("36"));
  CHECK(chain.Gamma1 == rf("48*x^4"));
  CHECK(chain.J0 == rf("24 - 64*x^5"));
  // the second-order pair equals the first covector
  auto ab = covector_alpha(o);
  CHECK((chain.beta1 - ab.A).is_zero());
  CHECK((chain.beta2 - ab.B).is_zero());
}

TEST_CASE("three-J0 identity expands as hand-computed") {
  auto chain = bgd_chain(ode_rf(fixed_px2_ode()));
  // 3 J0 = beta2 Gamma0 - beta1 Gamma1 = 72 - 192 x^5
  RatFunc lhs = Rational(3) * chain.J0;
  CHECK(lhs == rf("72 - 192*x^5"));
  CHECK((lhs - (chain.beta2 * chain.Gamma0 - chain.beta1 * chain.Gamma1))
            .is_zero());
}

TEST_CASE("operators coincide with the frame") {
  auto o = ode_rf(fixed_px2_ode());
  auto chain = bgd_chain(o);
  auto ops = bgd_operators(chain, o);
  SdCore core = frame_and_connection(o);
  CHECK((ops.D1[0] - core.X[0]).is_zero());
  CHECK((ops.D1[1] - core.X[1]).is_zero());
  CHECK((ops.D2[0] - core.Y[0]).is_zero());
  CHECK((ops.D2[1] - core.Y[1]).is_zero());
  // mu1 = -F as extension elements
  CHECK((ops.mu1 + FExt::root_pow(ops.field, 1)).is_zero());
  // the mu2 route to the second operator agrees where beta1 != 0
  REQUIRE(ops.D2_via_mu2.has_value());
  CHECK(((*ops.D2_via_mu2)[0] - ops.D2[0]).is_zero());
  CHECK(((*ops.D2_via_mu2)[1] - ops.D2[1]).is_zero());
}

TEST_CASE("mu1 numerically equals the negated real fifth root of F^5") {
  auto o = ode_rf(fixed_px2_ode());
  auto chain = bgd_chain(o);
  auto ops = bgd_operators(chain, o);
  RationalSampler sampler(17);
  int done = 0;
  for (int i = 0; i < 100 && done < 50; ++i) {
    auto [px, py] = sampler.next_point();
    auto bind = [&](const AtomPtr& a) -> double {
      if (a == atom_x()) return px.get_d();
      if (a == atom_y()) return py.get_d();
      throw EvalError("unbound");
    };
    double f5 = rf_eval_d(to_ratfunc(parse("64*x^5-24")), bind);
    if (std::fabs(f5) < 1e-6) continue;
    double mu1 = ops.mu1.eval_d(bind);
    CHECK(mu1 == doctest::Approx(-real_fifth_root(f5)).epsilon(1e-9));
    ++done;
  }
  CHECK(done == 50);
}

TEST_CASE("scalars and omegas") {
  auto o = ode_rf(fixed_px2_ode());
  auto chain = bgd_chain(o);
  auto ops = bgd_operators(chain, o);
  auto bs = bgd_scalars(chain, ops);
  SdCore core = frame_and_connection(o);
  SdScalars sd = scalars_explicit(core, o);

  // IB3 = 15 I6, so it vanishes at x = 0 like I6 does.
  CHECK((bs.IB3 - sd.I6 * Rational(15)).is_zero());
  auto bind0 = [](const AtomPtr& a) -> double {
    return a->kind == AtomKind::VarX ? 0.0 : 0.0;
  };
  CHECK(bs.IB3.eval_d(bind0) == doctest::Approx(0.0).epsilon(1e-12));

  // both omega routes agree, and they equal (L, -K)
  CHECK((bs.Omega1 - bs.Omega1_comm).is_zero());
  CHECK((bs.Omega2 - bs.Omega2_comm).is_zero());
  CHECK((bs.Omega1 - sd.L).is_zero());
  CHECK((bs.Omega2 + sd.K).is_zero());
}

TEST_CASE("weight-0 scalars are numerically invariant under a pullback") {
  auto ode = fixed_px2_ode();
  auto shear = fixed_nonlinear_maps()[0];
  auto pulled = pullback(ode, shear);
  auto o0 = ode_rf(ode), o1 = ode_rf(pulled);
  auto b0 = bgd_scalars(bgd_chain(o0), bgd_operators(bgd_chain(o0), o0));
  auto b1 = bgd_scalars(bgd_chain(o1), bgd_operators(bgd_chain(o1), o1));
  double x0 = 0.4, y0 = -0.3;
  double xt = x0, yt = y0 + x0 * x0;
  auto bind0 = [&](const AtomPtr& a) -> double {
    if (a == atom_x()) return x0;
    if (a == atom_y()) return y0;
    throw EvalError("unbound");
  };
  auto bind1 = [&](const AtomPtr& a) -> double {
    if (a == atom_x()) return xt;
    if (a == atom_y()) return yt;
    throw EvalError("unbound");
  };
  for (auto get : {&BgdScalars::IB1, &BgdScalars::IB2, &BgdScalars::IB3,
                   &BgdScalars::IB4}) {
    double v0 = (b0.*get).eval_d(bind0);
    double v1 = (b1.*get).eval_d(bind1);
    CHECK(v0 == doctest::Approx(v1).epsilon(1e-9));
  }
}

TEST_CASE("degenerate chain is refused") {
  auto o = ode_rf(fixed_zero_ode());
  auto chain = bgd_chain(o);
  CHECK_THROWS_AS(bgd_operators(chain, o), DegenerateError);
}
