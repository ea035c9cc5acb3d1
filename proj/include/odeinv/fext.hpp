#pragma once

#include <array>
#include <memory>
#include <optional>

#include "odeinv/ratfunc.hpp"

namespace odeinv {

/// Raised when an operation needs general position (F^5 not identically
/// zero) but the input is degenerate.
class DegenerateError : public KernelError {
 public:
  using KernelError::KernelError;
};

/// Shared description of the extension: the modulus F^5 and the
/// differentiation context the coefficients live in. d(f) = f * dm/(5m).
struct FExtField {
  RatFunc modulus;  // the value of F^5; must not be identically zero
  const DiffContext* ctx;

  FExtField(RatFunc m, const DiffContext& c) : modulus(std::move(m)), ctx(&c) {
    if (modulus.is_zero())
      throw DegenerateError("F^5 vanishes identically; not general position");
  }

  /// dlog = d(modulus)/(5*modulus), the logarithmic derivative of the root.
  const RatFunc& dlog(Dir d) const;

  /// Derivative of a coefficient whose denominator is (typically) a power of
  /// the modulus: computes the reduced quotient-rule form directly instead of
  /// leaving a squared denominator for the gcd to untangle.
  RatFunc diff_coeff(const RatFunc& c, Dir d) const;

 private:
  mutable std::optional<RatFunc> dlog_[2];
  mutable std::mutex mu_;
};

using FExtFieldPtr = std::shared_ptr<const FExtField>;

/// Element of the degree-5 extension Q(atoms)[f]/(f^5 - F^5):
/// c0 + c1 f + c2 f^2 + c3 f^3 + c4 f^4. The formal root f plays the role of
/// F itself; numerically it is the real fifth root of F^5.
class FExt {
 public:
  FExt() = default;
  explicit FExt(FExtFieldPtr field) : field_(std::move(field)) {}
  FExt(FExtFieldPtr field, const RatFunc& scalar);

  static FExt root_pow(const FExtFieldPtr& field, int k);  // f^k, any integer k

  const FExtFieldPtr& field() const { return field_; }
  const RatFunc& coeff(int k) const { return c_[k]; }

  bool is_zero() const;
  bool operator==(const FExt& o) const;
  bool operator!=(const FExt& o) const { return !(*this == o); }

  /// The single nonzero grade (k, coefficient); empty if mixed-grade or zero.
  std::optional<std::pair<int, RatFunc>> single_grade() const;

  FExt diff(Dir d) const;

  /// Substitutes a concrete value for f (a fifth root of the modulus in the
  /// coefficient field); used to compare against formulas written directly in
  /// an F atom.
  RatFunc eval_root(const RatFunc& f_value) const;

  /// Numeric value with the unique real fifth root of modulus(point).
  double eval_d(const std::function<double(const AtomPtr&)>& bind) const;

  std::string to_string() const;

  friend FExt operator+(const FExt& a, const FExt& b);
  friend FExt operator-(const FExt& a, const FExt& b);
  friend FExt operator-(const FExt& a);
  friend FExt operator*(const FExt& a, const FExt& b);
  friend FExt operator*(const FExt& a, const RatFunc& s);
  friend FExt operator*(const RatFunc& s, const FExt& a) { return a * s; }
  friend FExt operator*(const FExt& a, const Rational& s);

  /// Division by a single-grade element c*f^k (every denominator in scope is
  /// a rational multiple of a power of F).
  friend FExt operator/(const FExt& a, const FExt& b);
  FExt div_root_pow(int k) const;  // divide by f^k

 private:
  FExtFieldPtr field_;
  std::array<RatFunc, 5> c_{};
};

double real_fifth_root(double v);

}  // namespace odeinv
