#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "odeinv/ratfunc.hpp"

namespace odeinv {

class ParseError : public KernelError {
 public:
  ParseError(const std::string& msg, size_t offset)
      : KernelError(msg + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

class SolveError : public KernelError {
 public:
  using KernelError::KernelError;
};

enum class ExprKind : uint8_t {
  Number,    // exact rational constant
  Var,       // x or y
  Opaque,    // named symbol with derivative multi-index
  Sum,       // n-ary
  Product,   // n-ary
  Quotient,  // kids[0] / kids[1]
  Power,     // kids[0] ^ exponent, exponent a nonzero integer
  Negate,    // -kids[0]
  Func       // sin | cos | exp | ln applied to kids[0]
};

class Expr;
struct ExprNode {
  ExprKind kind;
  Rational value;         // Number
  Dir var = Dir::X;       // Var
  std::string name;       // Opaque symbol name or function name
  int px = 0, py = 0;     // Opaque multi-index
  int exponent = 0;       // Power
  std::vector<Expr> kids;
};

/// Immutable symbolic expression tree with structural sharing.
class Expr {
 public:
  Expr() : Expr(number(0)) {}

  static Expr number(const Rational& q);
  static Expr number(long v) { return number(Rational(v)); }
  static Expr var(Dir d);
  static Expr x() { return var(Dir::X); }
  static Expr y() { return var(Dir::Y); }
  static Expr opaque(const std::string& name, int px = 0, int py = 0);
  static Expr sum(std::vector<Expr> kids);
  static Expr product(std::vector<Expr> kids);
  static Expr quotient(Expr num, Expr den);
  static Expr pow(Expr base, int exponent);
  static Expr negate(Expr e);
  static Expr func(const std::string& fn, Expr arg);

  const ExprNode& node() const { return *n_; }
  ExprKind kind() const { return n_->kind; }

  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) {
    return sum({a, negate(b)});
  }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator/(const Expr& a, const Expr& b) {
    return quotient(a, b);
  }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const ExprNode> n_;
};

/// Parses the expression grammar; throws ParseError with a byte offset.
Expr parse(std::string_view text);

/// d^(p+q) e / dx^p dy^q by the standard rules; opaque symbols shift their
/// multi-index, so mixed partials commute by construction.
Expr partial(const Expr& e, int p, int q);

/// Canonical rational normal form over the expression's atoms.
class NormalForm {
 public:
  explicit NormalForm(RatFunc rf) : rf_(std::move(rf)) {}
  const RatFunc& ratfunc() const { return rf_; }
  const Poly& numerator() const { return rf_.num(); }
  const Poly& denominator() const { return rf_.den(); }
  bool is_zero() const { return rf_.is_zero(); }
  /// True when a nonconstant common factor was cancelled on the way here,
  /// so the normal form is valid away from that factor's zero set.
  bool domain_caveat() const { return rf_.domain_restricted(); }
  std::string to_string() const { return rf_.to_string(); }
  Expr to_expr() const;

 private:
  RatFunc rf_;
};

NormalForm normalize(const Expr& e);
RatFunc to_ratfunc(const Expr& e);
Expr to_expr(const RatFunc& rf);

struct EqualResult {
  bool equal = false;
  /// Exact verdicts come from the rational normal form; probable ones from
  /// random numeric probing (only taken when elementary-function atoms block
  /// the rational decision).
  bool exact = true;
  bool domain_caveat = false;
  explicit operator bool() const { return equal; }
};

EqualResult equal(const Expr& a, const Expr& b, uint64_t seed = 0,
                  double tol = 1e-9);

struct OpaqueSym {
  std::string name;
  int px = 0, py = 0;
  auto operator<=>(const OpaqueSym&) const = default;
};

/// Numeric value; exact while the computation stays rational.
struct Value {
  bool exact = true;
  Rational q;
  double d = 0.0;
  double as_double() const { return exact ? q.get_d() : d; }
};

using Bindings = std::map<OpaqueSym, Rational>;

Value eval(const Expr& e, const Rational& x, const Rational& y,
           const Bindings& bindings = {});

/// Solves lhs = rhs for the opaque symbol s; lhs-rhs must be of degree
/// exactly 1 in s (as a rational function numerator).
Expr solve_linear_for(const Expr& lhs, const Expr& rhs, const OpaqueSym& s);

/// Deterministic stream of rational sample points with numerator and
/// denominator bounded by 97.
class RationalSampler {
 public:
  explicit RationalSampler(uint64_t seed) : rng_(seed ^ 0xa076'1d64'78bd'642full) {}
  Rational next();
  Rational next_nonzero();
  std::pair<Rational, Rational> next_point();
  /// Bounded to [-2, 2]: numerator in [-97, 97], denominator in [49, 97].
  /// For double-precision probing of high-degree quantities.
  Rational next_small();
  std::pair<Rational, Rational> next_small_point();
  uint64_t next_raw() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

}  // namespace odeinv
