#include <cmath>

#include "doctest.h"
#include "odeinv/corpus.hpp"
#include "odeinv/ode.hpp"

using namespace odeinv;

namespace {

bool nf_equal(const Expr& a, const Expr& b) {
  return (to_ratfunc(a) - to_ratfunc(b)).is_zero();
}

bool same_ode(const OdeCoefficients& a, const OdeCoefficients& b) {
  return nf_equal(a.P, b.P) && nf_equal(a.Q, b.Q) && nf_equal(a.R, b.R) &&
         nf_equal(a.S, b.S);
}

PointTransformation inverse_of(const PointTransformation& t) {
  return {t.inv_x, t.inv_y, t.fwd_x, t.fwd_y};
}

double eval_xy(const Expr& e, double x, double y) {
  return rf_eval_d(to_ratfunc(e), [&](const AtomPtr& a) -> double {
    if (a == atom_x()) return x;
    if (a == atom_y()) return y;
    throw EvalError("unbound");
  });
}

// One RK4 step for y'' = P + 3Q y' + 3R y'^2 + S y'^3.
void rk4_step(const OdeCoefficients& ode, double& x, double& y, double& yp,
              double h) {
  auto f = [&](double xx, double yy, double pp) {
    double P = eval_xy(ode.P, xx, yy), Q = eval_xy(ode.Q, xx, yy);
    double R = eval_xy(ode.R, xx, yy), S = eval_xy(ode.S, xx, yy);
    return P + 3 * Q * pp + 3 * R * pp * pp + S * pp * pp * pp;
  };
  double k1y = yp, k1p = f(x, y, yp);
  double k2y = yp + h / 2 * k1p, k2p = f(x + h / 2, y + h / 2 * k1y, yp + h / 2 * k1p);
  double k3y = yp + h / 2 * k2p, k3p = f(x + h / 2, y + h / 2 * k2y, yp + h / 2 * k2p);
  double k4y = yp + h * k3p, k4p = f(x + h, y + h * k3y, yp + h * k3p);
  y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
  yp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
  x += h;
}

}  // namespace

TEST_CASE("jacobians") {
  auto id = PointTransformation::identity();
  auto m = jacobians(id);
  CHECK(nf_equal(m.Tmat[0][0], Expr::number(1)));
  CHECK(nf_equal(m.Tmat[0][1], Expr::number(0)));
  CHECK(nf_equal(m.detT, Expr::number(1)));
  CHECK(nf_equal(m.Smat[1][1], Expr::number(1)));

  auto scale = PointTransformation::parse_file(
      "xt = x\nyt = 2*y\nx = xt\ny = yt/2\n");
  auto ms = jacobians(scale);
  CHECK(nf_equal(ms.Tmat[1][1], Expr::number(2)));
  CHECK(nf_equal(ms.detT, Expr::number(2)));
  CHECK(nf_equal(ms.Smat[1][1], parse("1/2")));

  auto shear = fixed_nonlinear_maps()[0];  // xt = x, yt = y + x^2
  auto msh = jacobians(shear);
  CHECK(nf_equal(msh.Tmat[1][0], parse("2*x")));
  CHECK(nf_equal(msh.Tmat[0][0], Expr::number(1)));
  CHECK(nf_equal(msh.detT, Expr::number(1)));
}

TEST_CASE("transformation validation") {
  for (const auto& t : fixed_nonlinear_maps())
    CHECK_NOTHROW(validate_transformation(t));
  PointTransformation broken = PointTransformation::parse_file(
      "xt = x\nyt = 2*y\nx = xt\ny = yt\n");  // wrong inverse
  CHECK_THROWS_AS(validate_transformation(broken), TransformError);
}

TEST_CASE("pullback of the trivial equation") {
  auto zero = fixed_zero_ode();
  CHECK(same_ode(pullback(zero, PointTransformation::identity()), zero));

  auto scale = PointTransformation::parse_file(
      "xt = x\nyt = 2*y\nx = xt\ny = yt/2\n");
  CHECK(same_ode(pullback(zero, scale), zero));

  // Straight lines go to straight lines under the coordinate swap.
  auto swap = fixed_nonlinear_maps()[1];
  CHECK(same_ode(pullback(zero, swap), zero));
}

TEST_CASE("pullback round trip is the identity in normal form") {
  auto odes = {fixed_px2_ode(), fixed_py2_ode(),
               random_polynomial_odes(3, 1, 2)[0]};
  for (const auto& ode : odes) {
    for (const auto& t : fixed_nonlinear_maps()) {
      auto round = pullback(pullback(ode, t), inverse_of(t));
      CHECK(same_ode(round, ode));
    }
  }
}

TEST_CASE("pullback composition agrees numerically") {
  auto ode = fixed_px2_ode();
  auto maps = fixed_nonlinear_maps();
  auto t1 = maps[0];
  auto t2 = maps[2];
  auto composed = compose(t1, t2);
  auto a = pullback(ode, composed);
  auto b = pullback(pullback(ode, t1), t2);
  RationalSampler sampler(11);
  int done = 0;
  for (int i = 0; i < 60 && done < 20; ++i) {
    auto [px, py] = sampler.next_point();
    try {
      double xa = eval_xy(a.P, px.get_d(), py.get_d());
      double xb = eval_xy(b.P, px.get_d(), py.get_d());
      double sa = eval_xy(a.S, px.get_d(), py.get_d());
      double sb = eval_xy(b.S, px.get_d(), py.get_d());
      CHECK(std::fabs(xa - xb) <= 1e-9 * std::max({1.0, std::fabs(xa)}));
      CHECK(std::fabs(sa - sb) <= 1e-9 * std::max({1.0, std::fabs(sa)}));
      ++done;
    } catch (const EvalError&) {
      continue;
    }
  }
  CHECK(done == 20);
}

TEST_CASE("pullback agrees with numeric integration through matched data") {
  // Integrate the original equation, push the endpoint through the map, and
  // compare with integrating the transformed equation from matched data.
  auto ode = fixed_px2_ode();
  auto shear = fixed_nonlinear_maps()[0];  // xt = x, yt = y + x^2
  auto pulled = pullback(ode, shear);
  double x = 0.1, y = 0.2, yp = 0.3;
  // matched initial data: yt' = (dyt/dx)/(dxt/dx) along the curve
  double xt = x, yt = y + x * x, ytp = yp + 2 * x;
  for (int i = 0; i < 200; ++i) {
    rk4_step(ode, x, y, yp, 1e-3);
    rk4_step(pulled, xt, yt, ytp, 1e-3);
  }
  CHECK(xt == doctest::Approx(x).epsilon(1e-9));
  CHECK(yt == doctest::Approx(y + x * x).epsilon(1e-7));
  CHECK(ytp == doctest::Approx(yp + 2 * x).epsilon(1e-7));
}

TEST_CASE("cubic coefficient extraction uses the factor-3 convention") {
  // y'' = 0 under xt = x, yt = y + x^2 becomes yt'' = 2.
  auto pulled = pullback(fixed_zero_ode(), fixed_nonlinear_maps()[0]);
  CHECK(nf_equal(pulled.P, Expr::number(2)));
  CHECK(nf_equal(pulled.Q, Expr::number(0)));
  CHECK(nf_equal(pulled.R, Expr::number(0)));
  CHECK(nf_equal(pulled.S, Expr::number(0)));
}

TEST_CASE("transform_components") {
  auto scale = PointTransformation::parse_file(
      "xt = x\nyt = 2*y\nx = xt\ny = yt/2\n");

  // A weight-0 scalar only gets composed with the map: the tilde component
  // xt + yt (spelled in the tilde chart's own variables) becomes x + 2y.
  auto s0 = transform_components(
      PseudoField::scalar(parse("x + y"), 0), scale);
  CHECK(nf_equal(s0.comps[0], parse("x + 2*y")));

  // weight 1 scalar picks up detT = 2
  auto s1 = transform_components(PseudoField::scalar(Expr::number(1), 1), scale);
  CHECK(nf_equal(s1.comps[0], Expr::number(2)));

  // d is well defined: valence (0,2), weight -1 reproduces itself
  for (const auto& t : fixed_nonlinear_maps()) {
    auto d = PseudoField::matrix_lower(
        {{{Expr::number(0), Expr::number(1)},
          {Expr::number(-1), Expr::number(0)}}},
        -1);
    auto back = transform_components(d, t);
    CHECK(nf_equal(back.comps[0], Expr::number(0)));
    CHECK(nf_equal(back.comps[1], Expr::number(1)));
    CHECK(nf_equal(back.comps[2], Expr::number(-1)));
    CHECK(nf_equal(back.comps[3], Expr::number(0)));
    // and the (2,0), weight +1 variant
    auto du = PseudoField::matrix_upper(
        {{{Expr::number(0), Expr::number(1)},
          {Expr::number(-1), Expr::number(0)}}},
        1);
    auto back_u = transform_components(du, t);
    CHECK(nf_equal(back_u.comps[1], Expr::number(1)));
    CHECK(nf_equal(back_u.comps[2], Expr::number(-1)));
  }

  // identity map with weight 0 is the identity on components
  auto cov = PseudoField::covector(parse("x^2"), parse("y"), 0);
  auto same = transform_components(cov, PointTransformation::identity());
  CHECK(nf_equal(same.comps[0], parse("x^2")));
  CHECK(nf_equal(same.comps[1], parse("y")));

  CHECK_THROWS_AS(
      transform_components(PseudoField::scalar(parse("B"), 0), scale),
      TransformError);
}

TEST_CASE("detS detT composes to one") {
  for (const auto& t : fixed_nonlinear_maps()) {
    auto m = jacobians(t);
    // compose detS with the forward map, then multiply by detT
    std::map<AtomPtr, RatFunc> fwd{{atom_x(), to_ratfunc(t.fwd_x)},
                                   {atom_y(), to_ratfunc(t.fwd_y)}};
    RatFunc prod =
        rf_subst(to_ratfunc(m.detS), fwd) * to_ratfunc(m.detT);
    CHECK((prod - RatFunc(Rational(1))).is_zero());
  }
}

TEST_CASE("raise_index") {
  auto cov = PseudoField::covector(parse("A"), parse("B"), 1);
  auto vec = raise_index(cov);
  CHECK(vec.r == 1);
  CHECK(vec.s == 0);
  CHECK(vec.weight == 2);
  CHECK(nf_equal(vec.comps[0], parse("B")));
  CHECK(nf_equal(vec.comps[1], parse("-A")));

  auto zero = raise_index(PseudoField::covector(Expr::number(0), Expr::number(0), 3));
  CHECK(nf_equal(zero.comps[0], Expr::number(0)));
  CHECK(nf_equal(zero.comps[1], Expr::number(0)));

  // (beta_1, beta_2) = (-H, G) raises to (G, H)
  auto beta = raise_index(PseudoField::covector(parse("-H"), parse("G"), 3));
  CHECK(nf_equal(beta.comps[0], parse("G")));
  CHECK(nf_equal(beta.comps[1], parse("H")));

  CHECK_THROWS_AS(raise_index(PseudoField::scalar(parse("x"), 0)),
                  TransformError);
}
