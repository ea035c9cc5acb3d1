#include "odeinv/ratfunc.hpp"

#include <cassert>

namespace odeinv {

RatFunc::RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw ZeroDivide();
  if (num_.is_zero()) {
    den_ = Poly::constant(1);
    return;
  }
  if (!den_.is_constant()) {
    Poly g = poly_gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = *poly_try_div(num_, g);
      den_ = *poly_try_div(den_, g);
      domain_restricted_ = true;
    }
  }
  Rational c = poly_unit_content(den_);
  num_ = num_ * (1 / c);
  den_ = den_ * (1 / c);
}

std::set<AtomPtr> RatFunc::atoms() const {
  std::set<AtomPtr> s = num_.atoms();
  for (const auto& a : den_.atoms()) s.insert(a);
  return s;
}

bool RatFunc::has_func_atoms() const {
  for (const auto& a : atoms())
    if (a->kind == AtomKind::Func) return true;
  return false;
}

std::string RatFunc::to_string() const {
  if (den_.is_one()) return poly_to_string(num_);
  std::string n = poly_to_string(num_);
  std::string d = poly_to_string(den_);
  if (num_.terms.size() > 1) n = "(" + n + ")";
  if (den_.terms.size() > 1) d = "(" + d + ")";
  return n + "/" + d;
}

std::string RatFunc::key() const {
  return poly_key(num_) + "|" + poly_key(den_);
}

RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  RatFunc r;
  if (a.den_ == b.den_) {
    r = RatFunc(a.num_ + b.num_, a.den_);
  } else {
    // lcm of the denominators keeps repeated factors from piling up.
    Poly g = poly_gcd(a.den_, b.den_);
    if (g.is_constant()) {
      r = RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    } else {
      Poly da = *poly_try_div(a.den_, g);
      Poly db = *poly_try_div(b.den_, g);
      r = RatFunc(a.num_ * db + b.num_ * da, a.den_ * db);
    }
  }
  r.domain_restricted_ |= a.domain_restricted_ || b.domain_restricted_;
  return r;
}

RatFunc operator-(const RatFunc& a) {
  RatFunc r = a;
  r.num_ = -r.num_;
  return r;
}

RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

namespace {

// Cancels common factors across a fraction pair before multiplying out;
// reports whether a nonconstant factor went away.
bool cross_cancel(Poly& num, Poly& den) {
  if (num.is_zero() || den.is_constant() || num.is_constant()) return false;
  Poly g = poly_gcd(num, den);
  if (g.is_constant()) return false;
  num = *poly_try_div(num, g);
  den = *poly_try_div(den, g);
  return true;
}

}  // namespace

RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  Poly n1 = a.num_, d1 = a.den_, n2 = b.num_, d2 = b.den_;
  bool cancelled = cross_cancel(n1, d2);
  cancelled |= cross_cancel(n2, d1);
  RatFunc r(n1 * n2, d1 * d2);
  r.domain_restricted_ |= cancelled || a.domain_restricted_ || b.domain_restricted_;
  return r;
}

RatFunc operator/(const RatFunc& a, const RatFunc& b) {
  if (b.num_.is_zero()) throw ZeroDivide();
  Poly n1 = a.num_, d1 = a.den_, n2 = b.num_, d2 = b.den_;
  // After inversion the roles swap: cancel numerators against numerators and
  // denominators against denominators.
  bool cancelled = cross_cancel(n1, n2);
  cancelled |= cross_cancel(d2, d1);
  RatFunc r(n1 * d2, d1 * n2);
  r.domain_restricted_ |= cancelled || a.domain_restricted_ || b.domain_restricted_;
  return r;
}

RatFunc rf_pow(const RatFunc& a, int e) {
  if (e == 0) return RatFunc(Rational(1));
  bool inv = e < 0;
  int n = inv ? -e : e;
  RatFunc r = RatFunc(poly_pow(a.num(), n), poly_pow(a.den(), n));
  if (inv) r = RatFunc(Rational(1)) / r;
  return r;
}

Rational rf_eval(const RatFunc& r,
                 const std::function<Rational(const AtomPtr&)>& bind) {
  Rational d = poly_eval(r.den(), bind);
  if (d == 0) throw EvalError("pole at evaluation point");
  return poly_eval(r.num(), bind) / d;
}

double rf_eval_d(const RatFunc& r,
                 const std::function<double(const AtomPtr&)>& bind) {
  double d = poly_eval_d(r.den(), bind);
  if (d == 0.0) throw EvalError("pole at evaluation point");
  return poly_eval_d(r.num(), bind) / d;
}

RatFunc rf_subst(const RatFunc& r, const std::map<AtomPtr, RatFunc>& map) {
  auto subst_poly = [&](const Poly& p) {
    RatFunc acc;
    for (const auto& [m, c] : p.terms) {
      RatFunc term{c};
      for (const auto& [a, e] : m.factors) {
        auto it = map.find(a);
        RatFunc base = it != map.end() ? it->second : RatFunc::from_atom(a);
        term = term * rf_pow(base, e);
      }
      acc = acc + term;
    }
    return acc;
  };
  return subst_poly(r.num()) / subst_poly(r.den());
}

RatFunc DiffContext::atom_derivative(const AtomPtr& a, Dir d) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find({a.get(), d});
    if (it != memo_.end()) return it->second;
  }
  RatFunc r = atom_derivative_impl(a, d);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(std::make_pair(a.get(), d), r);
  return r;
}

RatFunc DiffContext::diff(const RatFunc& r, Dir d) const {
  // d(n/q) = (n' q - n q') / q^2, with polynomial derivatives expanded over
  // the atoms: d p = sum_a (formal dp/da) * (da).
  auto dpoly = [&](const Poly& p) {
    RatFunc acc;
    for (const auto& a : p.atoms()) {
      RatFunc da = atom_derivative(a, d);
      if (da.is_zero()) continue;
      acc = acc + RatFunc(poly_formal_partial(p, a)) * da;
    }
    return acc;
  };
  RatFunc dn = dpoly(r.num());
  if (r.den().is_one()) return dn;
  RatFunc dq = dpoly(r.den());
  RatFunc den(r.den());
  return (dn * den - RatFunc(r.num()) * dq) / (den * den);
}

RatFunc DiffContext::diff(const RatFunc& r, int px, int py) const {
  RatFunc out = r;
  for (int i = 0; i < px; ++i) out = diff(out, Dir::X);
  for (int i = 0; i < py; ++i) out = diff(out, Dir::Y);
  return out;
}

const PlainDiff& PlainDiff::instance() {
  static PlainDiff ctx;
  return ctx;
}

RatFunc PlainDiff::atom_derivative_impl(const AtomPtr& a, Dir d) const {
  switch (a->kind) {
    case AtomKind::VarX:
      return RatFunc(Rational(d == Dir::X ? 1 : 0));
    case AtomKind::VarY:
      return RatFunc(Rational(d == Dir::Y ? 1 : 0));
    case AtomKind::Opaque:
      return RatFunc::from_atom(atom_opaque(
          a->name, a->px + (d == Dir::X ? 1 : 0), a->py + (d == Dir::Y ? 1 : 0)));
    case AtomKind::Func: {
      RatFunc du = diff(*a->arg, d);
      if (du.is_zero()) return du;
      auto arg = a->arg;
      if (a->name == "sin")
        return RatFunc::from_atom(atom_func("cos", arg)) * du;
      if (a->name == "cos")
        return -(RatFunc::from_atom(atom_func("sin", arg)) * du);
      if (a->name == "exp")
        return RatFunc::from_atom(atom_func("exp", arg)) * du;
      if (a->name == "ln") return du / *arg;
      throw KernelError("no derivative rule for function " + a->name);
    }
  }
  throw KernelError("unreachable atom kind");
}

}  // namespace odeinv
