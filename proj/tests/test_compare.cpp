#include "doctest.h"
#include "odeinv/compare.hpp"
#include "odeinv/corpus.hpp"
#include "odeinv/report.hpp"

using namespace odeinv;

TEST_CASE("classification of the three fixed equations") {
  CHECK(classify(fixed_zero_ode()).kind == VerdictKind::MaximalDegeneration);

  Verdict v = classify(fixed_px2_ode(),
                       std::make_pair(Rational(0), Rational(0)));
  CHECK(v.kind == VerdictKind::GeneralPosition);
  REQUIRE(v.f5_at_witness.has_value());
  CHECK(*v.f5_at_witness == Rational(-24));

  Verdict vy = classify(fixed_py2_ode());
  CHECK(vy.kind == VerdictKind::OtherCase);
  CHECK_FALSE(vy.probabilistic);  // F^5 == 0 exactly
}

TEST_CASE("witness search is seeded and reproducible") {
  Verdict a = classify(fixed_px2_ode(), std::nullopt, 9);
  Verdict b = classify(fixed_px2_ode(), std::nullopt, 9);
  REQUIRE(a.kind == VerdictKind::GeneralPosition);
  REQUIRE(a.witness.has_value());
  CHECK(a.witness == b.witness);
}

TEST_CASE("classification is preserved under transformations") {
  for (const auto& ode : {fixed_zero_ode(), fixed_px2_ode(), fixed_py2_ode()}) {
    VerdictKind kind = classify(ode).kind;
    for (const auto& t : fixed_nonlinear_maps())
      CHECK(classify(pullback(ode, t)).kind == kind);
  }
}

TEST_CASE("identity suite is exact-zero on a small corpus") {
  // The full 25-equation run lives in the acceptance binary; a small slice
  // here keeps the unit suite fast while exercising every report.
  for (const auto& ode :
       {fixed_px2_ode(), random_polynomial_odes(2, 1, 1)[0]}) {
    auto reports = verify_identities(ode);
    CHECK(reports.size() >= 40);
    for (const auto& r : reports) {
      INFO(r.name << " residual " << r.residual);
      CHECK(r.status == CheckStatus::ExactZero);
    }
  }
}

TEST_CASE("degenerate equations run only the unconditional identities") {
  auto reports = verify_identities(fixed_zero_ode());
  CHECK(reports.size() == 7);
  for (const auto& r : reports) CHECK(r.status == CheckStatus::ExactZero);

  auto reports_y = verify_identities(fixed_py2_ode());
  CHECK(reports_y.size() == 7);
  for (const auto& r : reports_y) CHECK(r.status == CheckStatus::ExactZero);
}

TEST_CASE("invariant derivatives commute with pullback as scalars") {
  // D1(I8) and D2(I6) are weight-0 scalars; their values at matched points
  // agree. Both are single-grade, so the comparison can be made exact.
  auto ode = fixed_px2_ode();
  auto shear = fixed_nonlinear_maps()[0];
  auto pulled = pullback(ode, shear);
  auto value_pair = [](const OdeCoefficients& eq) {
    OdeRf o = ode_rf(eq);
    SdCore core = frame_and_connection(o);
    SdScalars s = scalars_explicit(core, o);
    return std::make_pair(apply_operator(core.X, s.I8),
                          apply_operator(core.Y, s.I6));
  };
  auto [d1i8_a, d2i6_a] = value_pair(ode);
  auto [d1i8_b, d2i6_b] = value_pair(pulled);
  Rational x0(1, 3), y0(-1, 2);
  std::map<AtomPtr, Rational> fwd0{{atom_x(), x0}, {atom_y(), y0}};
  Rational xt = x0, yt = y0 + x0 * x0;
  auto exact_match = [&](const FExt& a, const FExt& b) {
    auto sa = a.single_grade(), sb = b.single_grade();
    REQUIRE(sa.has_value());
    REQUIRE(sb.has_value());
    REQUIRE(sa->first == sb->first);
    auto bind0 = [&](const AtomPtr& at) -> Rational {
      return at == atom_x() ? x0 : y0;
    };
    auto bind1 = [&](const AtomPtr& at) -> Rational {
      return at == atom_x() ? xt : yt;
    };
    SdPointEvaluator::Scalar ca{rf_eval(sa->second, bind0), sa->first};
    SdPointEvaluator::Scalar cb{rf_eval(sb->second, bind1), sb->first};
    Rational f5a = rf_eval(a.field()->modulus, bind0);
    Rational f5b = rf_eval(b.field()->modulus, bind1);
    CHECK(root_multiples_equal(ca, f5a, cb, f5b));
  };
  exact_match(d1i8_a, d1i8_b);
  exact_match(d2i6_a, d2i6_b);
}

TEST_CASE("report serialization round-trips losslessly") {
  RunReport rep;
  rep.verdict = "GeneralPositionAt(0,0)";
  rep.scalars_sd.push_back({"I2", "1/3", "exact"});
  rep.scalars_bgd.push_back({"Omega1", "-0.25", "numeric"});
  IdentityReport id;
  id.name = "lemma_3_3_J0_is_minus_F5";
  id.status = CheckStatus::ExactZero;
  id.residual = "0";
  rep.identities.push_back(id);
  id.name = "numeric_example";
  id.status = CheckStatus::NumericZero;
  id.tolerance = 1e-9;
  rep.identities.push_back(id);
  rep.timing_ms = 0;

  std::string text = report_to_json(rep);
  RunReport back = report_from_json(text);
  CHECK(report_to_json(back) == text);
  CHECK(back.verdict == rep.verdict);
  CHECK(back.scalars_sd.size() == 1);
  CHECK(back.identities[1].tolerance == 1e-9);
}

TEST_CASE("identical seeds give byte-identical reports") {
  auto run = [] {
    RunReport rep;
    rep.verdict = classify(fixed_px2_ode(), std::nullopt, 3).describe();
    rep.identities = verify_identities(fixed_px2_ode(), 3);
    return report_to_json(rep);
  };
  CHECK(run() == run());
}
