#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "odeinv/poly.hpp"

namespace odeinv {

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Division by an expression that is identically zero.
class ZeroDivide : public KernelError {
 public:
  ZeroDivide() : KernelError("division by an identically zero expression") {}
};

/// Evaluation hit a pole or an unbound symbol.
class EvalError : public KernelError {
 public:
  using KernelError::KernelError;
};

/// Rational function in canonical normal form: gcd(num, den) = 1, den has
/// coprime integer coefficients with positive leading coefficient (in the
/// lexicographic atom order). Two expressions equal as rational functions of
/// their atoms have structurally identical RatFunc.
class RatFunc {
 public:
  RatFunc() : num_(Poly::zero()), den_(Poly::constant(1)) {}
  explicit RatFunc(const Rational& c)
      : num_(Poly::constant(c)), den_(Poly::constant(1)) {}
  explicit RatFunc(const Poly& p) : num_(p), den_(Poly::constant(1)) {}
  RatFunc(Poly num, Poly den);  // reduces; throws ZeroDivide if den == 0

  static RatFunc from_int(long v) { return RatFunc(Rational(v)); }
  static RatFunc from_atom(const AtomPtr& a) { return RatFunc(Poly::from_atom(a)); }
  static RatFunc var(Dir d) { return from_atom(atom_var(d)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

  /// True when reducing this value (or any value it was computed from)
  /// cancelled a nonconstant factor, shrinking the natural domain (x/x -> 1).
  bool domain_restricted() const { return domain_restricted_; }

  bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

  std::set<AtomPtr> atoms() const;
  bool has_func_atoms() const;

  std::string to_string() const;
  std::string key() const;

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator-(const RatFunc& a);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);

 private:
  Poly num_, den_;
  bool domain_restricted_ = false;
};

RatFunc rf_pow(const RatFunc& a, int e);  // any integer exponent

inline RatFunc operator*(const RatFunc& a, const Rational& c) {
  return a * RatFunc(c);
}
inline RatFunc operator*(const Rational& c, const RatFunc& a) { return a * c; }
inline RatFunc operator/(const RatFunc& a, const Rational& c) {
  return a / RatFunc(c);
}

/// Exact evaluation at a point; atoms are bound by the callback. Throws
/// EvalError on poles.
Rational rf_eval(const RatFunc& r,
                 const std::function<Rational(const AtomPtr&)>& bind);
double rf_eval_d(const RatFunc& r,
                 const std::function<double(const AtomPtr&)>& bind);

/// Substitutes rational functions for atoms (atoms without an entry stay).
RatFunc rf_subst(const RatFunc& r, const std::map<AtomPtr, RatFunc>& map);

/// Differentiation strategy: how each atom differentiates. Implementations
/// are pure and memoize internally (thread-safe).
class DiffContext {
 public:
  virtual ~DiffContext() = default;

  RatFunc diff(const RatFunc& r, Dir d) const;
  RatFunc diff(const RatFunc& r, int px, int py) const;

  /// Derivative of a single atom as a rational function.
  RatFunc atom_derivative(const AtomPtr& a, Dir d) const;

 protected:
  virtual RatFunc atom_derivative_impl(const AtomPtr& a, Dir d) const = 0;

 private:
  mutable std::mutex mu_;
  mutable std::map<std::pair<const AtomData*, Dir>, RatFunc> memo_;
};

/// Standard rules: d x = 1, d y = 0 (and vice versa), an opaque symbol's
/// multi-index shifts, elementary functions follow the chain rule.
class PlainDiff : public DiffContext {
 public:
  static const PlainDiff& instance();

 protected:
  RatFunc atom_derivative_impl(const AtomPtr& a, Dir d) const override;
};

}  // namespace odeinv
