#include "odeinv/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>

namespace odeinv {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

bool is_number(const Expr& e, const Rational& v) {
  return e.kind() == ExprKind::Number && e.node().value == v;
}

}  // namespace

Expr Expr::number(const Rational& q) {
  ExprNode n;
  n.kind = ExprKind::Number;
  n.value = q;
  return Expr(make_node(std::move(n)));
}

Expr Expr::var(Dir d) {
  ExprNode n;
  n.kind = ExprKind::Var;
  n.var = d;
  return Expr(make_node(std::move(n)));
}

Expr Expr::opaque(const std::string& name, int px, int py) {
  ExprNode n;
  n.kind = ExprKind::Opaque;
  n.name = name;
  n.px = px;
  n.py = py;
  return Expr(make_node(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  Rational acc(0);
  bool saw_const = false;
  for (auto& k : kids) {
    if (k.kind() == ExprKind::Sum) {
      for (const auto& kk : k.node().kids) flat.push_back(kk);
    } else if (k.kind() == ExprKind::Number) {
      acc += k.node().value;
      saw_const = true;
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (acc != 0 || (saw_const && flat.empty())) flat.push_back(number(acc));
  if (flat.empty()) return number(0);
  if (flat.size() == 1) return flat[0];
  ExprNode n;
  n.kind = ExprKind::Sum;
  n.kids = std::move(flat);
  return Expr(make_node(std::move(n)));
}

Expr Expr::product(std::vector<Expr> kids) {
  std::vector<Expr> flat;
  Rational acc(1);
  for (auto& k : kids) {
    if (k.kind() == ExprKind::Product) {
      for (const auto& kk : k.node().kids) {
        if (kk.kind() == ExprKind::Number)
          acc *= kk.node().value;
        else
          flat.push_back(kk);
      }
    } else if (k.kind() == ExprKind::Number) {
      acc *= k.node().value;
    } else {
      flat.push_back(std::move(k));
    }
  }
  if (acc == 0) return number(0);
  if (acc != 1) flat.insert(flat.begin(), number(acc));
  if (flat.empty()) return number(1);
  if (flat.size() == 1) return flat[0];
  ExprNode n;
  n.kind = ExprKind::Product;
  n.kids = std::move(flat);
  return Expr(make_node(std::move(n)));
}

Expr Expr::quotient(Expr num, Expr den) {
  if (is_number(den, 1)) return num;
  if (num.kind() == ExprKind::Number && den.kind() == ExprKind::Number &&
      den.node().value != 0)
    return number(num.node().value / den.node().value);
  ExprNode n;
  n.kind = ExprKind::Quotient;
  n.kids = {std::move(num), std::move(den)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::pow(Expr base, int exponent) {
  if (exponent == 0) return number(1);
  if (exponent == 1) return base;
  if (base.kind() == ExprKind::Number && exponent > 0) {
    Rational v(1);
    for (int i = 0; i < exponent; ++i) v *= base.node().value;
    return number(v);
  }
  ExprNode n;
  n.kind = ExprKind::Power;
  n.exponent = exponent;
  n.kids = {std::move(base)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::negate(Expr e) {
  if (e.kind() == ExprKind::Number) return number(-e.node().value);
  if (e.kind() == ExprKind::Negate) return e.node().kids[0];
  ExprNode n;
  n.kind = ExprKind::Negate;
  n.kids = {std::move(e)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::func(const std::string& fn, Expr arg) {
  ExprNode n;
  n.kind = ExprKind::Func;
  n.name = fn;
  n.kids = {std::move(arg)};
  return Expr(make_node(std::move(n)));
}

std::string Expr::to_string() const {
  const ExprNode& n = node();
  auto paren = [](const Expr& e) {
    std::string s = e.to_string();
    switch (e.kind()) {
      case ExprKind::Sum:
      case ExprKind::Negate:
      case ExprKind::Quotient:
      case ExprKind::Product:
        return "(" + s + ")";
      default:
        return s;
    }
  };
  switch (n.kind) {
    case ExprKind::Number: {
      std::string s = n.value.get_str();
      return s;
    }
    case ExprKind::Var:
      return n.var == Dir::X ? "x" : "y";
    case ExprKind::Opaque:
      if (n.px == 0 && n.py == 0) return n.name;
      return n.name + "_{" + std::to_string(n.px) + "." + std::to_string(n.py) +
             "}";
    case ExprKind::Sum: {
      std::string s;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        const Expr& k = n.kids[i];
        if (i == 0) {
          s = k.to_string();
        } else if (k.kind() == ExprKind::Negate) {
          s += " - " + paren(k.node().kids[0]);
        } else {
          s += " + " + k.to_string();
        }
      }
      return s;
    }
    case ExprKind::Product: {
      std::string s;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += "*";
        s += paren(n.kids[i]);
      }
      return s;
    }
    case ExprKind::Quotient:
      return paren(n.kids[0]) + "/" + paren(n.kids[1]);
    case ExprKind::Power:
      return paren(n.kids[0]) + "^" +
             (n.exponent < 0 ? "(" + std::to_string(n.exponent) + ")"
                             : std::to_string(n.exponent));
    case ExprKind::Negate:
      return "-" + paren(n.kids[0]);
    case ExprKind::Func:
      return n.name + "(" + n.kids[0].to_string() + ")";
  }
  return "?";
}

// --- parser -----------------------------------------------------------------

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg, size_t at) {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  mpz_class parse_integer_digits() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) fail("expected integer", start);
    return mpz_class(std::string(text.substr(start, pos - start)), 10);
  }

  int parse_exponent() {
    skip_ws();
    size_t at = pos;
    bool neg = eat('-');
    if (!std::isdigit(static_cast<unsigned char>(peek())))
      fail("expected integer exponent", pos);
    mpz_class v = parse_integer_digits();
    if (pos < text.size() && (text[pos] == '.'))
      fail("non-integer exponent literal", pos);
    if (!v.fits_sint_p()) fail("exponent out of range", at);
    int e = static_cast<int>(v.get_si());
    return neg ? -e : e;
  }

  std::string parse_ident() {
    skip_ws();
    size_t start = pos;
    if (pos >= text.size() ||
        !std::isalpha(static_cast<unsigned char>(text[pos])))
      fail("expected identifier", pos);
    while (pos < text.size() &&
           std::isalnum(static_cast<unsigned char>(text[pos])))
      ++pos;
    return std::string(text.substr(start, pos - start));
  }

  Expr parse_base() {
    skip_ws();
    size_t at = pos;
    if (pos >= text.size()) fail("unexpected end of input", pos);
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class v = parse_integer_digits();
      if (pos < text.size() && text[pos] == '.')
        fail("decimal literals are not supported; use rationals", pos);
      return Expr::number(Rational(v));
    }
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string id = parse_ident();
      if (id == "x") return Expr::x();
      if (id == "y") return Expr::y();
      bool is_func = id == "sin" || id == "cos" || id == "exp" || id == "ln";
      skip_ws();
      if (pos < text.size() && text[pos] == '(') {
        if (!is_func) fail("unknown function name '" + id + "'", at);
        ++pos;
        Expr arg = parse_expr();
        if (!eat(')')) fail("expected ')'", pos);
        return Expr::func(id, arg);
      }
      if (is_func) fail("function '" + id + "' needs an argument list", at);
      int px = 0, py = 0;
      if (pos + 1 < text.size() && text[pos] == '_' && text[pos + 1] == '{') {
        pos += 2;
        mpz_class a = parse_integer_digits();
        if (!eat('.')) fail("expected '.' in derivative index", pos);
        mpz_class b = parse_integer_digits();
        if (!eat('}')) fail("expected '}'", pos);
        if (!a.fits_sint_p() || !b.fits_sint_p())
          fail("derivative index out of range", at);
        px = static_cast<int>(a.get_si());
        py = static_cast<int>(b.get_si());
      }
      return Expr::opaque(id, px, py);
    }
    fail(std::string("unexpected character '") + c + "'", pos);
  }

  Expr parse_factor() {
    skip_ws();
    bool neg = false;
    if (peek() == '-') {
      ++pos;
      neg = true;
    }
    Expr base = parse_base();
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      int e = parse_exponent();
      base = Expr::pow(base, e);
      skip_ws();
      // '^' is right-associative, but the grammar only allows integer
      // exponents, so chains like x^2^3 cannot occur.
    }
    return neg ? Expr::negate(base) : base;
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      char c = peek();
      if (c == '*') {
        ++pos;
        e = Expr::product({e, parse_factor()});
      } else if (c == '/') {
        ++pos;
        e = Expr::quotient(e, parse_factor());
      } else {
        break;
      }
    }
    return e;
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos;
        e = Expr::sum({e, parse_term()});
      } else if (c == '-') {
        ++pos;
        e = Expr::sum({e, Expr::negate(parse_term())});
      } else {
        break;
      }
    }
    return e;
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  Expr e = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input", p.pos);
  return e;
}

// --- differentiation --------------------------------------------------------

namespace {

Expr partial1(const Expr& e, Dir d) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return Expr::number(0);
    case ExprKind::Var:
      return Expr::number(n.var == d ? 1 : 0);
    case ExprKind::Opaque:
      return Expr::opaque(n.name, n.px + (d == Dir::X ? 1 : 0),
                          n.py + (d == Dir::Y ? 1 : 0));
    case ExprKind::Sum: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const auto& k : n.kids) kids.push_back(partial1(k, d));
      return Expr::sum(std::move(kids));
    }
    case ExprKind::Product: {
      std::vector<Expr> terms;
      for (size_t i = 0; i < n.kids.size(); ++i) {
        std::vector<Expr> fac = n.kids;
        fac[i] = partial1(n.kids[i], d);
        terms.push_back(Expr::product(std::move(fac)));
      }
      return Expr::sum(std::move(terms));
    }
    case ExprKind::Quotient: {
      const Expr& a = n.kids[0];
      const Expr& b = n.kids[1];
      Expr da = partial1(a, d), db = partial1(b, d);
      return Expr::quotient(da * b - a * db, Expr::pow(b, 2));
    }
    case ExprKind::Power: {
      const Expr& b = n.kids[0];
      return Expr::product({Expr::number(n.exponent),
                            Expr::pow(b, n.exponent - 1), partial1(b, d)});
    }
    case ExprKind::Negate:
      return Expr::negate(partial1(n.kids[0], d));
    case ExprKind::Func: {
      const Expr& u = n.kids[0];
      Expr du = partial1(u, d);
      if (n.name == "sin") return Expr::func("cos", u) * du;
      if (n.name == "cos") return Expr::negate(Expr::func("sin", u)) * du;
      if (n.name == "exp") return Expr::func("exp", u) * du;
      if (n.name == "ln") return du / u;
      throw KernelError("no derivative rule for function " + n.name);
    }
  }
  throw KernelError("unreachable expression kind");
}

}  // namespace

Expr partial(const Expr& e, int p, int q) {
  Expr r = e;
  for (int i = 0; i < p; ++i) r = partial1(r, Dir::X);
  for (int i = 0; i < q; ++i) r = partial1(r, Dir::Y);
  return r;
}

// --- normal form ------------------------------------------------------------

RatFunc to_ratfunc(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return RatFunc(n.value);
    case ExprKind::Var:
      return RatFunc::var(n.var);
    case ExprKind::Opaque:
      return RatFunc::from_atom(atom_opaque(n.name, n.px, n.py));
    case ExprKind::Sum: {
      RatFunc acc;
      for (const auto& k : n.kids) acc = acc + to_ratfunc(k);
      return acc;
    }
    case ExprKind::Product: {
      RatFunc acc{Rational(1)};
      for (const auto& k : n.kids) acc = acc * to_ratfunc(k);
      return acc;
    }
    case ExprKind::Quotient:
      return to_ratfunc(n.kids[0]) / to_ratfunc(n.kids[1]);
    case ExprKind::Power:
      return rf_pow(to_ratfunc(n.kids[0]), n.exponent);
    case ExprKind::Negate:
      return -to_ratfunc(n.kids[0]);
    case ExprKind::Func: {
      RatFunc arg = to_ratfunc(n.kids[0]);
      return RatFunc::from_atom(
          atom_func(n.name, std::make_shared<const RatFunc>(std::move(arg))));
    }
  }
  throw KernelError("unreachable expression kind");
}

NormalForm normalize(const Expr& e) { return NormalForm(to_ratfunc(e)); }

namespace {

Expr atom_to_expr(const AtomPtr& a) {
  switch (a->kind) {
    case AtomKind::VarX:
      return Expr::x();
    case AtomKind::VarY:
      return Expr::y();
    case AtomKind::Opaque:
      return Expr::opaque(a->name, a->px, a->py);
    case AtomKind::Func:
      return Expr::func(a->name, to_expr(*a->arg));
  }
  throw KernelError("unreachable atom kind");
}

Expr poly_to_expr(const Poly& p) {
  if (p.is_zero()) return Expr::number(0);
  std::vector<Expr> terms;
  terms.reserve(p.terms.size());
  for (const auto& [m, c] : p.terms) {
    std::vector<Expr> factors;
    if (c != 1 || m.is_one()) factors.push_back(Expr::number(c));
    for (const auto& [a, e] : m.factors)
      factors.push_back(Expr::pow(atom_to_expr(a), e));
    terms.push_back(Expr::product(std::move(factors)));
  }
  return Expr::sum(std::move(terms));
}

}  // namespace

Expr to_expr(const RatFunc& rf) {
  Expr num = poly_to_expr(rf.num());
  if (rf.den().is_one()) return num;
  return Expr::quotient(num, poly_to_expr(rf.den()));
}

Expr NormalForm::to_expr() const { return odeinv::to_expr(rf_); }

// --- equality ---------------------------------------------------------------

EqualResult equal(const Expr& a, const Expr& b, uint64_t seed, double tol) {
  RatFunc ra = to_ratfunc(a);
  RatFunc rb = to_ratfunc(b);
  RatFunc diff = ra - rb;
  EqualResult res;
  res.domain_caveat = diff.domain_restricted();
  if (diff.is_zero()) {
    res.equal = true;
    res.exact = true;
    return res;
  }
  if (!diff.has_func_atoms()) {
    // Atoms are free over Q, so a nonzero normal form decides inequality.
    res.equal = false;
    res.exact = true;
    return res;
  }
  // Elementary-function atoms may hide identities (sin^2 + cos^2).
  // Probe at random rational points.
  RationalSampler sampler(seed);
  int done = 0, attempts = 0;
  bool all_close = true;
  while (done < 20 && attempts < 400) {
    ++attempts;
    Rational xr = sampler.next(), yr = sampler.next();
    auto bind = [&](const AtomPtr& atom) -> double {
      std::function<double(const AtomPtr&)> self = [&](const AtomPtr& at) -> double {
        switch (at->kind) {
          case AtomKind::VarX:
            return xr.get_d();
          case AtomKind::VarY:
            return yr.get_d();
          case AtomKind::Opaque:
            throw EvalError("unbound symbol " + atom_to_string(at));
          case AtomKind::Func: {
            double u = rf_eval_d(*at->arg, self);
            if (at->name == "sin") return std::sin(u);
            if (at->name == "cos") return std::cos(u);
            if (at->name == "exp") return std::exp(u);
            if (at->name == "ln") {
              if (u <= 0) throw EvalError("log of nonpositive value");
              return std::log(u);
            }
            throw EvalError("unknown function " + at->name);
          }
        }
        throw EvalError("unreachable");
      };
      return self(atom);
    };
    try {
      double va = rf_eval_d(ra, bind);
      double vb = rf_eval_d(rb, bind);
      double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
      if (std::fabs(va - vb) > tol * scale) {
        all_close = false;
        ++done;
        break;
      }
      ++done;
    } catch (const EvalError&) {
      continue;  // pole or domain issue; try another point
    }
  }
  res.exact = false;
  res.equal = done > 0 && all_close;
  return res;
}

// --- evaluation -------------------------------------------------------------

namespace {

Value value_add(const Value& a, const Value& b) {
  if (a.exact && b.exact) return {true, a.q + b.q, 0.0};
  return {false, Rational(0), a.as_double() + b.as_double()};
}

Value value_mul(const Value& a, const Value& b) {
  if (a.exact && b.exact) return {true, a.q * b.q, 0.0};
  return {false, Rational(0), a.as_double() * b.as_double()};
}

Value value_div(const Value& a, const Value& b) {
  if (a.exact && b.exact) {
    if (b.q == 0) throw EvalError("pole at evaluation point");
    return {true, a.q / b.q, 0.0};
  }
  double d = b.as_double();
  if (d == 0.0) throw EvalError("pole at evaluation point");
  return {false, Rational(0), a.as_double() / d};
}

}  // namespace

Value eval(const Expr& e, const Rational& x, const Rational& y,
           const Bindings& bindings) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return {true, n.value, 0.0};
    case ExprKind::Var:
      return {true, n.var == Dir::X ? x : y, 0.0};
    case ExprKind::Opaque: {
      auto it = bindings.find(OpaqueSym{n.name, n.px, n.py});
      if (it == bindings.end())
        throw EvalError("unbound symbol " + e.to_string());
      return {true, it->second, 0.0};
    }
    case ExprKind::Sum: {
      Value acc{true, Rational(0), 0.0};
      for (const auto& k : n.kids) acc = value_add(acc, eval(k, x, y, bindings));
      return acc;
    }
    case ExprKind::Product: {
      Value acc{true, Rational(1), 0.0};
      for (const auto& k : n.kids) acc = value_mul(acc, eval(k, x, y, bindings));
      return acc;
    }
    case ExprKind::Quotient:
      return value_div(eval(n.kids[0], x, y, bindings),
                       eval(n.kids[1], x, y, bindings));
    case ExprKind::Power: {
      Value b = eval(n.kids[0], x, y, bindings);
      int e2 = n.exponent;
      bool inv = e2 < 0;
      int k = inv ? -e2 : e2;
      Value acc{true, Rational(1), 0.0};
      for (int i = 0; i < k; ++i) acc = value_mul(acc, b);
      if (inv) return value_div(Value{true, Rational(1), 0.0}, acc);
      return acc;
    }
    case ExprKind::Negate: {
      Value v = eval(n.kids[0], x, y, bindings);
      if (v.exact) return {true, -v.q, 0.0};
      return {false, Rational(0), -v.d};
    }
    case ExprKind::Func: {
      Value u = eval(n.kids[0], x, y, bindings);
      double ud = u.as_double();
      double r;
      if (n.name == "sin")
        r = std::sin(ud);
      else if (n.name == "cos")
        r = std::cos(ud);
      else if (n.name == "exp")
        r = std::exp(ud);
      else if (n.name == "ln") {
        if (ud <= 0) throw EvalError("log of nonpositive value");
        r = std::log(ud);
      } else {
        throw EvalError("unknown function " + n.name);
      }
      return {false, Rational(0), r};
    }
  }
  throw KernelError("unreachable expression kind");
}

// --- linear solve -----------------------------------------------------------

Expr solve_linear_for(const Expr& lhs, const Expr& rhs, const OpaqueSym& s) {
  RatFunc e = to_ratfunc(lhs) - to_ratfunc(rhs);
  AtomPtr v = atom_opaque(s.name, s.px, s.py);
  int dn = e.num().degree_in(v);
  int dd = e.den().degree_in(v);
  if (dn == 0 && dd == 0)
    throw SolveError("symbol " + atom_to_string(v) + " is absent from the equation");
  if (dn >= 2)
    throw SolveError("equation has degree " + std::to_string(dn) + " in " +
                     atom_to_string(v));
  if (dn == 0)
    throw SolveError("coefficient of " + atom_to_string(v) +
                     " is identically zero");
  std::vector<Poly> cs = poly_coeffs_in(e.num(), v);
  RatFunc c1{cs[1]};
  RatFunc c0{cs[0]};
  return to_expr(-c0 / c1);
}

// --- sampling ----------------------------------------------------------------

Rational RationalSampler::next() {
  std::uniform_int_distribution<int> num(-97, 97);
  std::uniform_int_distribution<int> den(1, 97);
  Rational r(num(rng_), den(rng_));
  r.canonicalize();
  return r;
}

Rational RationalSampler::next_nonzero() {
  for (;;) {
    Rational r = next();
    if (r != 0) return r;
  }
}

std::pair<Rational, Rational> RationalSampler::next_point() {
  Rational a = next();
  Rational b = next();
  return {a, b};
}

Rational RationalSampler::next_small() {
  std::uniform_int_distribution<int> num(-97, 97);
  std::uniform_int_distribution<int> den(49, 97);
  Rational r(num(rng_), den(rng_));
  r.canonicalize();
  return r;
}

std::pair<Rational, Rational> RationalSampler::next_small_point() {
  Rational a = next_small();
  Rational b = next_small();
  return {a, b};
}

}  // namespace odeinv
