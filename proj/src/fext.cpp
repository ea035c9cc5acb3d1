#include "odeinv/fext.hpp"

#include <cassert>
#include <cmath>

namespace odeinv {

const RatFunc& FExtField::dlog(Dir d) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = dlog_[static_cast<int>(d)];
  if (!slot) slot = ctx->diff(modulus, d) / (modulus * Rational(5));
  return *slot;
}

RatFunc FExtField::diff_coeff(const RatFunc& c, Dir d) const {
  if (c.den().is_one() || !modulus.den().is_one() ||
      modulus.num().is_constant())
    return ctx->diff(c, d);
  const Poly& m = modulus.num();
  Poly cofactor = c.den();
  int j = 0;
  while (!cofactor.is_constant()) {
    auto q = poly_try_div(cofactor, m);
    if (!q) break;
    cofactor = *q;
    ++j;
  }
  if (j == 0) return ctx->diff(c, d);
  // d(n / (r m^j)) = (r (dn m - j n dm) - n dr m) / (r^2 m^(j+1)); with a
  // constant r the leading factor cancels and the denominator stays minimal.
  RatFunc n{c.num()}, r{cofactor}, mm{m};
  RatFunc dn = ctx->diff(n, d);
  RatFunc dm = ctx->diff(mm, d);
  RatFunc core = dn * mm - Rational(j) * n * dm;
  if (cofactor.is_constant())
    return core / (r * rf_pow(mm, j + 1));
  RatFunc dr = ctx->diff(r, d);
  return (r * core - n * dr * mm) / (r * r * rf_pow(mm, j + 1));
}

FExt::FExt(FExtFieldPtr field, const RatFunc& scalar) : field_(std::move(field)) {
  c_[0] = scalar;
}

FExt FExt::root_pow(const FExtFieldPtr& field, int k) {
  FExt r(field);
  int kk = ((k % 5) + 5) % 5;
  int drop = (k - kk) / 5;  // f^k = f^kk * m^drop  (drop may be negative)
  r.c_[kk] = rf_pow(field->modulus, drop);
  return r;
}

bool FExt::is_zero() const {
  for (const auto& c : c_)
    if (!c.is_zero()) return false;
  return true;
}

bool FExt::operator==(const FExt& o) const {
  for (int k = 0; k < 5; ++k)
    if (c_[k] != o.c_[k]) return false;
  return true;
}

std::optional<std::pair<int, RatFunc>> FExt::single_grade() const {
  int grade = -1;
  for (int k = 0; k < 5; ++k) {
    if (c_[k].is_zero()) continue;
    if (grade >= 0) return std::nullopt;
    grade = k;
  }
  if (grade < 0) return std::nullopt;
  return std::make_pair(grade, c_[grade]);
}

namespace {

FExtFieldPtr common_field(const FExt& a, const FExt& b) {
  if (a.field() && b.field()) {
    assert(a.field() == b.field() || a.field()->modulus == b.field()->modulus);
    return a.field();
  }
  return a.field() ? a.field() : b.field();
}

}  // namespace

FExt operator+(const FExt& a, const FExt& b) {
  FExt r(common_field(a, b));
  for (int k = 0; k < 5; ++k) r.c_[k] = a.c_[k] + b.c_[k];
  return r;
}

FExt operator-(const FExt& a, const FExt& b) {
  FExt r(common_field(a, b));
  for (int k = 0; k < 5; ++k) r.c_[k] = a.c_[k] - b.c_[k];
  return r;
}

FExt operator-(const FExt& a) {
  FExt r = a;
  for (auto& c : r.c_) c = -c;
  return r;
}

FExt operator*(const FExt& a, const FExt& b) {
  FExtFieldPtr field = common_field(a, b);
  assert(field);
  std::array<RatFunc, 9> conv{};
  for (int i = 0; i < 5; ++i) {
    if (a.c_[i].is_zero()) continue;
    for (int j = 0; j < 5; ++j) {
      if (b.c_[j].is_zero()) continue;
      conv[i + j] = conv[i + j] + a.c_[i] * b.c_[j];
    }
  }
  FExt r(field);
  for (int k = 0; k < 5; ++k) r.c_[k] = conv[k];
  for (int k = 5; k < 9; ++k)
    r.c_[k - 5] = r.c_[k - 5] + conv[k] * field->modulus;
  return r;
}

FExt operator*(const FExt& a, const RatFunc& s) {
  FExt r = a;
  for (auto& c : r.c_) c = c * s;
  return r;
}

FExt operator*(const FExt& a, const Rational& s) { return a * RatFunc(s); }

FExt FExt::div_root_pow(int k) const {
  // 1/f^k = f^(5n-k) / m^n for the least n with 5n >= k.
  if (k == 0) return *this;
  FExt inv = root_pow(field_, -k);
  return *this * inv;
}

FExt operator/(const FExt& a, const FExt& b) {
  auto sg = b.single_grade();
  if (!sg)
    throw KernelError(
        "extension-ring division by a mixed-grade element is out of scope");
  FExt r = a.div_root_pow(sg->first);
  for (auto& c : r.c_) c = c / sg->second;
  return r;
}

FExt FExt::diff(Dir d) const {
  // d(c_k f^k) = (d c_k) f^k + k c_k f^k dlog, with dlog = dm/(5m).
  FExt r(field_);
  const RatFunc& dlog = field_->dlog(d);
  for (int k = 0; k < 5; ++k) {
    if (c_[k].is_zero()) continue;
    r.c_[k] = field_->diff_coeff(c_[k], d) + c_[k] * dlog * Rational(k);
  }
  return r;
}

RatFunc FExt::eval_root(const RatFunc& f_value) const {
  RatFunc acc;
  RatFunc p{Rational(1)};
  for (int k = 0; k < 5; ++k) {
    if (!c_[k].is_zero()) acc = acc + c_[k] * p;
    p = p * f_value;
  }
  return acc;
}

double real_fifth_root(double v) {
  return std::copysign(std::pow(std::fabs(v), 0.2), v);
}

double FExt::eval_d(const std::function<double(const AtomPtr&)>& bind) const {
  double froot = real_fifth_root(rf_eval_d(field_->modulus, bind));
  double acc = 0.0, p = 1.0;
  for (int k = 0; k < 5; ++k) {
    if (!c_[k].is_zero()) acc += rf_eval_d(c_[k], bind) * p;
    p *= froot;
  }
  return acc;
}

std::string FExt::to_string() const {
  std::string s;
  for (int k = 0; k < 5; ++k) {
    if (c_[k].is_zero()) continue;
    if (!s.empty()) s += " + ";
    std::string coeff = c_[k].to_string();
    if (k == 0) {
      s += coeff;
    } else {
      std::string fp = k == 1 ? "F" : "F^" + std::to_string(k);
      s += coeff == "1" ? fp : "(" + coeff + ")*" + fp;
    }
  }
  return s.empty() ? "0" : s;
}

}  // namespace odeinv
