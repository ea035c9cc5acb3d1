#include "doctest.h"
#include "odeinv/expr.hpp"
#include "odeinv/fext.hpp"

using namespace odeinv;

namespace {

FExtFieldPtr corpus_field() {
  return std::make_shared<const FExtField>(to_ratfunc(parse("64*x^5 - 24")),
                                           PlainDiff::instance());
}

}  // namespace

TEST_CASE("ring laws with f^5 reduced to the modulus") {
  auto fld = corpus_field();
  FExt f = FExt::root_pow(fld, 1);
  FExt f5 = f * f * f * f * f;
  CHECK(f5 == FExt(fld, fld->modulus));
  // associativity / distributivity spot checks
  FExt a = FExt(fld, to_ratfunc(parse("x"))) + f * to_ratfunc(parse("y"));
  FExt b = f * f - FExt(fld, RatFunc(Rational(3)));
  FExt c = FExt::root_pow(fld, 4) * to_ratfunc(parse("1/(x+2)"));
  CHECK((a * b) * c == a * (b * c));
  CHECK(a * (b + c) == a * b + a * c);
}

TEST_CASE("inversion through f^4 / F^5") {
  auto fld = corpus_field();
  FExt f = FExt::root_pow(fld, 1);
  FExt inv = FExt::root_pow(fld, -1);
  CHECK(f * inv == FExt(fld, RatFunc(Rational(1))));
  FExt x9 = FExt::root_pow(fld, -9);
  CHECK(FExt::root_pow(fld, 9) * x9 == FExt(fld, RatFunc(Rational(1))));
}

TEST_CASE("derivative rule df = f dm / (5m)") {
  auto fld = corpus_field();
  FExt f = FExt::root_pow(fld, 1);
  FExt df = f.diff(Dir::X);
  // f^5 = m implies 5 f^4 df = dm, i.e. df * 5 f^4 - dm = 0.
  FExt resid = df * FExt::root_pow(fld, 4) * Rational(5) -
               FExt(fld, PlainDiff::instance().diff(fld->modulus, Dir::X));
  CHECK(resid.is_zero());
  CHECK(f.diff(Dir::Y).is_zero());  // the modulus depends only on x
}

TEST_CASE("division requires a single-grade divisor") {
  auto fld = corpus_field();
  FExt f = FExt::root_pow(fld, 1);
  FExt mixed = f + FExt(fld, RatFunc(Rational(1)));
  FExt single = f * to_ratfunc(parse("x"));
  CHECK((single / f) == FExt(fld, to_ratfunc(parse("x"))));
  CHECK_THROWS_AS(single / mixed, KernelError);
}

TEST_CASE("numeric evaluation uses the real fifth root") {
  auto fld = corpus_field();
  FExt f = FExt::root_pow(fld, 1);
  auto bind = [](const AtomPtr& a) -> double {
    return a->kind == AtomKind::VarX ? 0.0 : 0.0;
  };
  // m(0) = -24 < 0: the real fifth root is negative.
  CHECK(f.eval_d(bind) == doctest::Approx(-std::pow(24.0, 0.2)));
  CHECK(real_fifth_root(-32.0) == doctest::Approx(-2.0));
  CHECK(real_fifth_root(32.0) == doctest::Approx(2.0));
}

TEST_CASE("eval_root substitutes a concrete fifth root") {
  RatFunc f_atom = RatFunc::from_atom(atom_opaque("F", 0, 0));
  auto fld = std::make_shared<const FExtField>(rf_pow(f_atom, 5),
                                               PlainDiff::instance());
  FExt e = FExt::root_pow(fld, -9);  // 1/F^9 = f/m^2
  CHECK(e.eval_root(f_atom) == RatFunc(Rational(1)) / rf_pow(f_atom, 9));
}

TEST_CASE("degenerate modulus is refused") {
  CHECK_THROWS_AS(FExtField(RatFunc(), PlainDiff::instance()), DegenerateError);
}
