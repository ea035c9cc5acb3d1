#include <cmath>

#include "doctest.h"
#include "odeinv/expr.hpp"

using namespace odeinv;

TEST_CASE("parser handles the grammar") {
  CHECK(normalize(parse("0")).is_zero());
  CHECK(normalize(parse("64*x^5 - 24")).to_string() == "64*x^5 - 24");
  CHECK(normalize(parse("3/4")).to_string() == "3/4");
  CHECK(normalize(parse("B_{1.0} * x")).to_string() == "x*B_{1.0}");
  CHECK(normalize(parse("-x^2")).to_string() == "-x^2");     // unary minus below ^
  CHECK(normalize(parse("x^-2") - parse("1/x^2")).is_zero());
  CHECK(normalize(parse("sin(x)^2")).to_string() == "sin(x)^2");
  CHECK(normalize(parse("2 * # comment\n 3")).to_string() == "6");
}

TEST_CASE("parser rejects tokens outside the grammar") {
  CHECK_THROWS_AS(parse("1 + x^2*y'"), ParseError);
  CHECK_THROWS_AS(parse("foo(x)"), ParseError);
  CHECK_THROWS_AS(parse("x^1.5"), ParseError);
  CHECK_THROWS_AS(parse("x + "), ParseError);
  CHECK_THROWS_AS(parse("(x"), ParseError);
  try {
    parse("1 + x^2*y'");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.offset() == 9);  // the quote byte, zero-indexed
  }
}

TEST_CASE("partial derivatives") {
  CHECK(normalize(partial(parse("x^2*y"), 1, 1)).to_string() == "2*x");
  Expr b = parse("B");
  Expr db = partial(b, 1, 0);
  CHECK(normalize(db).to_string() == "B_{1.0}");
  CHECK(normalize(partial(parse("64*x^5-24"), 1, 0)).to_string() == "320*x^4");
  CHECK(normalize(partial(parse("sin(x*y)"), 1, 0) -
                  parse("cos(x*y)*y"))
            .is_zero());
  CHECK(normalize(partial(parse("ln(x)"), 1, 0) - parse("1/x")).is_zero());
}

TEST_CASE("mixed partials commute on a random corpus") {
  RationalSampler sampler(42);
  for (int i = 0; i < 10; ++i) {
    // random rational expression over x, y and an opaque symbol
    Rational c1 = sampler.next(), c2 = sampler.next(), c3 = sampler.next_nonzero();
    Expr e = parse("A_{0.1}*x^3") * Expr::number(c1) +
             parse("y^2/( x^2 + 1)") * Expr::number(c2) +
             parse("x*y") / Expr::number(c3);
    Expr a = partial(partial(e, 1, 0), 0, 1);
    Expr b = partial(partial(e, 0, 1), 1, 0);
    CHECK(normalize(a - b).is_zero());
  }
}

TEST_CASE("partial is linear") {
  Expr e1 = parse("x^3*y + A*x");
  Expr e2 = parse("y^2/(x+1)");
  Expr lhs = partial(Expr::number(Rational(2, 3)) * e1 +
                         Expr::number(Rational(-5)) * e2,
                     1, 1);
  Expr rhs = Expr::number(Rational(2, 3)) * partial(e1, 1, 1) +
             Expr::number(Rational(-5)) * partial(e2, 1, 1);
  CHECK(normalize(lhs - rhs).is_zero());
}

TEST_CASE("normal form and equality") {
  auto r = equal(parse("(x+y)^2"), parse("x^2 + 2*x*y + y^2"));
  CHECK(r.equal);
  CHECK(r.exact);

  auto r2 = equal(parse("x/x"), parse("1"));
  CHECK(r2.equal);
  CHECK(r2.domain_caveat);

  NormalForm nf = normalize(parse("A*B*A_{0.1}"));
  CHECK(nf.denominator().is_one());
  CHECK(nf.numerator().terms.size() == 1);

  // normalize is idempotent through reconstruction
  Expr back = nf.to_expr();
  CHECK(normalize(back).to_string() == nf.to_string());

  CHECK_THROWS_AS(normalize(parse("1/(x - x)")), ZeroDivide);
}

TEST_CASE("transcendental identities fall back to numeric probing") {
  auto r = equal(parse("sin(x)^2 + cos(x)^2"), parse("1"));
  CHECK(r.equal);
  CHECK_FALSE(r.exact);  // probable, not exact
  auto r2 = equal(parse("sin(x)"), parse("cos(x)"));
  CHECK_FALSE(r2.equal);
}

TEST_CASE("exact path matches numeric path on random rational expressions") {
  RationalSampler sampler(7);
  Expr e = parse("(3*x^2 - y/2 + 1)/(x^2 + y^2 + 5)");
  NormalForm nf = normalize(e);
  int tested = 0;
  for (int i = 0; i < 50; ++i) {
    auto [px, py] = sampler.next_point();
    Value v = eval(e, px, py);
    REQUIRE(v.exact);
    Rational direct = rf_eval(nf.ratfunc(), [&](const AtomPtr& a) {
      return a == atom_x() ? px : py;
    });
    CHECK(v.q == direct);
    ++tested;
  }
  CHECK(tested == 50);
}

TEST_CASE("evaluation") {
  CHECK(eval(parse("64*x^5 - 24"), 0, 0).q == -24);
  CHECK(eval(parse("64*x^5 - 24"), 1, 0).q == 40);
  CHECK(eval(parse("0"), 3, 7).q == 0);
  CHECK_THROWS_AS(eval(parse("1/x"), 0, 0), EvalError);
  CHECK_THROWS_AS(eval(parse("B"), 0, 0), EvalError);
  Bindings b{{OpaqueSym{"B", 0, 0}, Rational(5)}};
  CHECK(eval(parse("B + x"), 1, 0, b).q == 6);
  Value v = eval(parse("exp(x)"), 0, 0);
  CHECK_FALSE(v.exact);
  CHECK(v.d == doctest::Approx(1.0));
}

TEST_CASE("linear solve") {
  Expr sol = solve_linear_for(parse("2*s - 4*x"), parse("0"), {"s", 0, 0});
  CHECK(normalize(sol).to_string() == "2*x");
  CHECK_THROWS_AS(solve_linear_for(parse("s^2"), parse("1"), {"s", 0, 0}),
                  SolveError);
  CHECK_THROWS_AS(solve_linear_for(parse("x + y"), parse("0"), {"s", 0, 0}),
                  SolveError);
  CHECK_THROWS_AS(solve_linear_for(parse("s - s + x"), parse("0"), {"s", 0, 0}),
                  SolveError);
}
