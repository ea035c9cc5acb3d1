#pragma once

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "odeinv/atom.hpp"

namespace odeinv {

using Rational = mpq_class;

/// Product of atom powers, factors sorted ascending by atom order, all
/// exponents positive. The empty monomial is 1.
struct Monomial {
  std::vector<std::pair<AtomPtr, int>> factors;

  bool is_one() const { return factors.empty(); }
  int degree_of(const AtomPtr& a) const;
  int total_degree() const;
};

/// Lexicographic monomial order over the global atom order: the first atom
/// (in ascending atom order) whose exponents differ decides.
int mono_cmp(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
Monomial mono_gcd(const Monomial& a, const Monomial& b);
/// a / b; requires b | a.
Monomial mono_div(const Monomial& a, const Monomial& b);
bool mono_divides(const Monomial& b, const Monomial& a);  // b | a

/// Sparse multivariate polynomial with exact rational coefficients.
/// Terms are kept sorted in strictly descending monomial order with no zero
/// coefficients, so structural equality is semantic equality.
class Poly {
 public:
  std::vector<std::pair<Monomial, Rational>> terms;

  Poly() = default;
  static Poly zero() { return Poly{}; }
  static Poly constant(const Rational& c);
  static Poly from_atom(const AtomPtr& a, int exp = 1);
  static Poly from_monomial(Monomial m, const Rational& c);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  bool is_one() const;
  /// The constant value; requires is_constant().
  Rational constant_value() const;

  const Monomial& leading_monomial() const { return terms.front().first; }
  const Rational& leading_coeff() const { return terms.front().second; }

  int degree_in(const AtomPtr& a) const;
  std::set<AtomPtr> atoms() const;

  bool operator==(const Poly& o) const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator-(const Poly& a);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Rational& c);
Poly poly_pow(const Poly& a, int e);  // e >= 0

/// Exact division; empty when b does not divide a. b must be nonzero.
std::optional<Poly> poly_try_div(const Poly& a, const Poly& b);

/// Formal partial derivative with respect to a single atom.
Poly poly_formal_partial(const Poly& p, const AtomPtr& a);

/// gcd over Q, returned as a primitive integer polynomial with positive
/// leading coefficient (1 for coprime inputs). gcd(0,0) = 0.
Poly poly_gcd(const Poly& a, const Poly& b);

/// Positive rational c such that p/c has coprime integer coefficients and a
/// positive leading coefficient; sign of the leading coefficient is kept in c.
Rational poly_unit_content(const Poly& p);

/// Exact evaluation; every atom of p must be bound.
Rational poly_eval(const Poly& p,
                   const std::function<Rational(const AtomPtr&)>& bind);
double poly_eval_d(const Poly& p,
                   const std::function<double(const AtomPtr&)>& bind);

/// Coefficients of p viewed as univariate in atom v, ascending powers;
/// result[k] does not contain v. Size = degree_in(v)+1 (empty for p = 0).
std::vector<Poly> poly_coeffs_in(const Poly& p, const AtomPtr& v);
Poly poly_from_coeffs_in(const std::vector<Poly>& cs, const AtomPtr& v);

std::string poly_to_string(const Poly& p);
/// Canonical byte key (used for atom interning and report determinism).
std::string poly_key(const Poly& p);

}  // namespace odeinv
