#include <cmath>

#include "doctest.h"
#include "odeinv/corpus.hpp"
#include "odeinv/invariants_sd.hpp"

using namespace odeinv;

namespace {

RatFunc rf(const char* s) { return to_ratfunc(parse(s)); }

double at_x(const FExt& v, double x) {
  return v.eval_d([&](const AtomPtr& a) -> double {
    if (a == atom_x()) return x;
    if (a == atom_y()) return 0.0;
    throw EvalError("unbound");
  });
}

}  // namespace

TEST_CASE("covector components on the fixed equations") {
  // Frozen oracle values, checked term by term against the defining sums.
  auto o = ode_rf(fixed_px2_ode());
  auto ab = covector_alpha(o);
  CHECK(ab.A == rf("4*x"));
  CHECK(ab.B == rf("2"));
  auto gh = covector_beta(o, ab);
  CHECK(gh.G == rf("48*x^4"));
  CHECK(gh.H == rf("-36"));
  CHECK(pseudoscalar_F5(o, ab) == rf("64*x^5 - 24"));

  auto oz = ode_rf(fixed_zero_ode());
  auto abz = covector_alpha(oz);
  CHECK(abz.A.is_zero());
  CHECK(abz.B.is_zero());
  auto ghz = covector_beta(oz, abz);
  CHECK(ghz.G.is_zero());
  CHECK(ghz.H.is_zero());
  CHECK(pseudoscalar_F5(oz, abz).is_zero());

  auto oy = ode_rf(fixed_py2_ode());
  auto aby = covector_alpha(oy);
  CHECK(aby.A == rf("2"));
  CHECK(aby.B.is_zero());
  auto ghy = covector_beta(oy, aby);
  CHECK(ghy.G.is_zero());
  CHECK(ghy.H.is_zero());
  CHECK(pseudoscalar_F5(oy, aby).is_zero());  // degenerate despite A != 0
}

TEST_CASE("every G term carries A, a B derivative, or Q") {
  // A == 0, B constant, Q == 0 forces G == 0: P = -1 (so A = B' = 0), rest 0
  // has A = 0, B = 0; use S = 1 instead: A = 0, B = 0 too. The structural
  // claim is checked on the formula directly with opaque data.
  OdeRf o{rf("P"), RatFunc(), rf("R"), rf("S"), &PlainDiff::instance()};
  SdCovector ab{RatFunc(), rf("7")};  // A = 0, B constant
  auto gh = covector_beta(o, ab);
  CHECK(gh.G.is_zero());
}

TEST_CASE("frame and connection on the corpus equation") {
  auto o = ode_rf(fixed_px2_ode());
  SdCore core = frame_and_connection(o);
  // X^1 = B/F^2: at x = 0 the coefficient of f^3 is B/m = 2/(-24) = -1/12.
  CHECK(core.X[0].coeff(3) == rf("2/(64*x^5 - 24)"));
  CHECK(core.X[1].coeff(3) == rf("-4*x/(64*x^5 - 24)"));
  // F depends only on x, so the (2,2) component -R + 2F_{0.1}/(3F) vanishes.
  CHECK(core.conn.g2_22.is_zero());
}

TEST_CASE("connection component with S") {
  auto o = ode_rf(fixed_px2_ode());
  SdCore core = frame_and_connection(o);
  CHECK(core.conn.g1_22 == rf("x^2"));
  CHECK(core.conn.g2_11 == rf("-1"));
}

TEST_CASE("scalar relations of the dependency block") {
  auto o = ode_rf(fixed_px2_ode());
  SdCore core = frame_and_connection(o);
  SdScalars s = scalars_explicit(core, o);
  CHECK(s.I2 == FExt(core.field, RatFunc(Rational(1, 3))));
  CHECK((s.I1 + s.I6 * Rational(4)).is_zero());
  CHECK((s.I4 - s.I6 * Rational(4)).is_zero());
  CHECK((s.I5 + s.I8).is_zero());
  CHECK((s.L - (s.I3 + s.I8)).is_zero());
  CHECK((s.K + s.I6 * Rational(3)).is_zero());
  CHECK((s.I6 - s.I6_alt).is_zero());  // both printed routes agree
}

TEST_CASE("corpus equation values at x = 0") {
  auto o = ode_rf(fixed_px2_ode());
  SdCore core = frame_and_connection(o);
  SdScalars s = scalars_explicit(core, o);
  CHECK(at_x(s.I6, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_x(s.K, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_x(s.I2, 0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("connection route is an exact oracle for the explicit formulas") {
  for (const auto& ode :
       {fixed_px2_ode(), random_polynomial_odes(21, 1, 1)[0]}) {
    auto o = ode_rf(ode);
    SdCovector ab = covector_alpha(o);
    if (pseudoscalar_F5(o, ab).is_zero()) continue;
    SdCore core = frame_and_connection(o);
    SdScalars a = scalars_explicit(core, o);
    SdScalars b = scalars_via_connection(core, o);
    CHECK((a.I1 - b.I1).is_zero());
    CHECK((a.I2 - b.I2).is_zero());
    CHECK((a.I3 - b.I3).is_zero());
    CHECK((a.I4 - b.I4).is_zero());
    CHECK((a.I5 - b.I5).is_zero());
    CHECK((a.I6 - b.I6).is_zero());
    CHECK((a.I7 - b.I7).is_zero());
    CHECK((a.I8 - b.I8).is_zero());
    CHECK((a.L - b.L).is_zero());
    CHECK((a.K - b.K).is_zero());
  }
}

TEST_CASE("commutator identity [X,Y] = L X - K Y") {
  auto o = ode_rf(fixed_px2_ode());
  SdCore core = frame_and_connection(o);
  SdScalars s = scalars_explicit(core, o);
  auto c = commutator(core.X, core.Y);
  CHECK((c[0] - (s.L * core.X[0] - s.K * core.Y[0])).is_zero());
  CHECK((c[1] - (s.L * core.X[1] - s.K * core.Y[1])).is_zero());
}

TEST_CASE("3 F^5 = B H + A G") {
  for (const auto& ode : acceptance_corpus(5, 4, 2)) {
    auto o = ode_rf(ode);
    auto ab = covector_alpha(o);
    auto gh = covector_beta(o, ab);
    RatFunc f5 = pseudoscalar_F5(o, ab);
    CHECK((Rational(3) * f5 - (ab.B * gh.H + ab.A * gh.G)).is_zero());
  }
}

TEST_CASE("point evaluator agrees with the symbolic scalars") {
  for (const auto& ode :
       {fixed_px2_ode(), random_polynomial_odes(33, 1, 2)[0]}) {
    auto o = ode_rf(ode);
    if (pseudoscalar_F5(o, covector_alpha(o)).is_zero()) continue;
    SdCore core = frame_and_connection(o);
    SdScalars s = scalars_explicit(core, o);
    SdPointEvaluator ev(o);
    RationalSampler sampler(3);
    int done = 0;
    for (int i = 0; i < 60 && done < 15; ++i) {
      auto [px, py] = sampler.next_small_point();
      auto bind = [&](const AtomPtr& a) -> double {
        if (a == atom_x()) return px.get_d();
        if (a == atom_y()) return py.get_d();
        throw EvalError("unbound");
      };
      try {
        double f5 = rf_eval_d(core.F5, bind);
        if (std::fabs(f5) < 1e-3) continue;
        double root = real_fifth_root(f5);
        auto v = ev.at(px, py);
        CHECK(v.I3.value(root) == doctest::Approx(s.I3.eval_d(bind)).epsilon(1e-9));
        CHECK(v.I6.value(root) == doctest::Approx(s.I6.eval_d(bind)).epsilon(1e-9));
        CHECK(v.I7.value(root) == doctest::Approx(s.I7.eval_d(bind)).epsilon(1e-9));
        CHECK(v.I8.value(root) == doctest::Approx(s.I8.eval_d(bind)).epsilon(1e-9));
        CHECK(v.L.value(root) == doctest::Approx(s.L.eval_d(bind)).epsilon(1e-9));
        CHECK(v.K.value(root) == doctest::Approx(s.K.eval_d(bind)).epsilon(1e-9));
        ++done;
      } catch (const EvalError&) {
        continue;
      }
    }
    CHECK(done == 15);
  }
}

TEST_CASE("degenerate equations are refused by the frame") {
  auto o = ode_rf(fixed_zero_ode());
  CHECK_THROWS_AS(frame_and_connection(o), DegenerateError);
}

TEST_CASE("F5 picks up detT^5 under the doubling map") {
  // under yt = 2y, F^5(x, y) = 2^5 * F5tilde(x, 2y)
  auto ode = fixed_px2_ode();
  auto scale = PointTransformation::parse_file(
      "xt = x\nyt = 2*y\nx = xt\ny = yt/2\n");
  auto pulled = pullback(ode, scale);
  auto o1 = ode_rf(pulled);
  auto ab1 = covector_alpha(o1);
  RatFunc f5t = pseudoscalar_F5(o1, ab1);
  // compose with the forward map yt = 2y and compare
  std::map<AtomPtr, RatFunc> fwd{{atom_x(), rf("x")}, {atom_y(), rf("2*y")}};
  RatFunc lhs = to_ratfunc(parse("64*x^5 - 24"));
  RatFunc rhs = rf_subst(f5t, fwd) * Rational(32);
  CHECK((lhs - rhs).is_zero());
}
