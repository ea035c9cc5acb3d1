#include "odeinv/ode.hpp"

#include <cassert>
#include <cmath>
#include <sstream>

namespace odeinv {

OdeCoefficients OdeCoefficients::zero() {
  return {Expr::number(0), Expr::number(0), Expr::number(0), Expr::number(0)};
}

OdeCoefficients OdeCoefficients::from_strings(std::string_view p,
                                              std::string_view q,
                                              std::string_view r,
                                              std::string_view s) {
  return {parse(p), parse(q), parse(r), parse(s)};
}

OdeRf ode_rf(const OdeCoefficients& ode) {
  OdeRf v;
  v.P = to_ratfunc(ode.P);
  v.Q = to_ratfunc(ode.Q);
  v.R = to_ratfunc(ode.R);
  v.S = to_ratfunc(ode.S);
  v.ctx = &PlainDiff::instance();
  return v;
}

PointTransformation PointTransformation::identity() {
  return {Expr::x(), Expr::y(), Expr::x(), Expr::y()};
}

namespace {

/// Replaces the opaque symbols `xt`, `yt` (index (0,0)) by the coordinate
/// variables: inverse-map expressions are written in the tilde chart.
RatFunc tilde_vars_to_xy(const Expr& e) {
  RatFunc rf = to_ratfunc(e);
  std::map<AtomPtr, RatFunc> map;
  map[atom_opaque("xt", 0, 0)] = RatFunc::var(Dir::X);
  map[atom_opaque("yt", 0, 0)] = RatFunc::var(Dir::Y);
  return rf_subst(rf, map);
}

}  // namespace

PointTransformation PointTransformation::parse_file(std::string_view text) {
  std::optional<Expr> xt, yt, xi, yi;
  size_t line_start = 0;
  std::string data(text);
  std::istringstream in(data);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (!blank)
        throw ParseError("expected 'name = expression'", line_start);
      line_start += line.size() + 1;
      continue;
    }
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t\r") + 1);
    Expr value = parse(line.substr(eq + 1));
    if (key == "xt")
      xt = value;
    else if (key == "yt")
      yt = value;
    else if (key == "x")
      xi = value;
    else if (key == "y")
      yi = value;
    else
      throw ParseError("unknown key '" + key + "' in transformation file",
                       line_start);
    line_start += line.size() + 1;
  }
  if (!xt || !yt || !xi || !yi)
    throw ParseError("transformation file needs xt, yt, x and y lines", 0);
  // Store the inverse maps with the tilde chart spelled as (x, y).
  return {*xt, *yt, to_expr(tilde_vars_to_xy(*xi)), to_expr(tilde_vars_to_xy(*yi))};
}

PointTransformation compose(const PointTransformation& t1,
                            const PointTransformation& t2) {
  std::map<AtomPtr, RatFunc> fwd1;
  fwd1[atom_x()] = to_ratfunc(t1.fwd_x);
  fwd1[atom_y()] = to_ratfunc(t1.fwd_y);
  std::map<AtomPtr, RatFunc> inv2;
  inv2[atom_x()] = to_ratfunc(t2.inv_x);
  inv2[atom_y()] = to_ratfunc(t2.inv_y);
  PointTransformation out;
  out.fwd_x = to_expr(rf_subst(to_ratfunc(t2.fwd_x), fwd1));
  out.fwd_y = to_expr(rf_subst(to_ratfunc(t2.fwd_y), fwd1));
  out.inv_x = to_expr(rf_subst(to_ratfunc(t1.inv_x), inv2));
  out.inv_y = to_expr(rf_subst(to_ratfunc(t1.inv_y), inv2));
  return out;
}

void validate_transformation(const PointTransformation& t, uint64_t seed,
                             int points, double tol) {
  RationalSampler sampler(seed);
  RatFunc fx = to_ratfunc(t.fwd_x), fy = to_ratfunc(t.fwd_y);
  RatFunc ix = to_ratfunc(t.inv_x), iy = to_ratfunc(t.inv_y);
  const DiffContext& ctx = PlainDiff::instance();
  RatFunc detT = ctx.diff(fx, Dir::X) * ctx.diff(fy, Dir::Y) -
                 ctx.diff(fx, Dir::Y) * ctx.diff(fy, Dir::X);
  int ok = 0, attempts = 0;
  while (ok < points && attempts < points * 20) {
    ++attempts;
    auto [px, py] = sampler.next_point();
    auto bind = [&](const AtomPtr& a) -> double {
      if (a == atom_x()) return px.get_d();
      if (a == atom_y()) return py.get_d();
      throw EvalError("transformation maps must involve only x and y");
    };
    try {
      double tx = rf_eval_d(fx, bind);
      double ty = rf_eval_d(fy, bind);
      double dt = rf_eval_d(detT, bind);
      if (std::fabs(dt) < tol)
        throw TransformError("Jacobian determinant vanishes at a sample point");
      auto bind_img = [&](const AtomPtr& a) -> double {
        if (a == atom_x()) return tx;
        if (a == atom_y()) return ty;
        throw EvalError("transformation maps must involve only x and y");
      };
      double rx = rf_eval_d(ix, bind_img);
      double ry = rf_eval_d(iy, bind_img);
      double scale = std::max({1.0, std::fabs(px.get_d()), std::fabs(py.get_d())});
      if (std::fabs(rx - px.get_d()) > tol * scale ||
          std::fabs(ry - py.get_d()) > tol * scale)
        throw TransformError(
            "declared inverse does not round-trip at a sample point");
      ++ok;
    } catch (const EvalError&) {
      continue;  // sampled a pole; try another point
    }
  }
  if (ok < points)
    throw TransformError("could not find enough pole-free sample points");
}

TransitionMatrices jacobians(const PointTransformation& t) {
  TransitionMatrices m;
  m.Tmat[0][0] = partial(t.fwd_x, 1, 0);
  m.Tmat[0][1] = partial(t.fwd_x, 0, 1);
  m.Tmat[1][0] = partial(t.fwd_y, 1, 0);
  m.Tmat[1][1] = partial(t.fwd_y, 0, 1);
  m.Smat[0][0] = partial(t.inv_x, 1, 0);
  m.Smat[0][1] = partial(t.inv_x, 0, 1);
  m.Smat[1][0] = partial(t.inv_y, 1, 0);
  m.Smat[1][1] = partial(t.inv_y, 0, 1);
  m.detT = to_expr(to_ratfunc(m.Tmat[0][0] * m.Tmat[1][1] -
                              m.Tmat[0][1] * m.Tmat[1][0]));
  m.detS = to_expr(to_ratfunc(m.Smat[0][0] * m.Smat[1][1] -
                              m.Smat[0][1] * m.Smat[1][0]));
  return m;
}

// --- pullback ---------------------------------------------------------------

namespace {

// Polynomials in the new first derivative w, with rational-function
// coefficients; index k holds the coefficient of w^k.
using WPoly = std::vector<RatFunc>;

WPoly wp_add(const WPoly& a, const WPoly& b) {
  WPoly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] = r[i] + a[i];
    if (i < b.size()) r[i] = r[i] + b[i];
  }
  return r;
}

WPoly wp_mul(const WPoly& a, const WPoly& b) {
  if (a.empty() || b.empty()) return {};
  WPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = r[i + j] + a[i] * b[j];
  return r;
}

WPoly wp_scale(const WPoly& a, const RatFunc& c) {
  WPoly r = a;
  for (auto& v : r) v = v * c;
  return r;
}

WPoly wp_neg(const WPoly& a) {
  WPoly r = a;
  for (auto& v : r) v = -v;
  return r;
}

// Total derivative along the solution curve, without the dw/dxt part:
// coefficients pick up d/dxt plus w * d/dyt.
WPoly wp_total_derivative(const WPoly& a, const DiffContext& ctx) {
  WPoly r(a.size() + 1);
  for (size_t k = 0; k < a.size(); ++k) {
    r[k] = r[k] + ctx.diff(a[k], Dir::X);
    r[k + 1] = r[k + 1] + ctx.diff(a[k], Dir::Y);
  }
  return r;
}

}  // namespace

OdeCoefficients pullback(const OdeCoefficients& ode,
                         const PointTransformation& t) {
  const DiffContext& ctx = PlainDiff::instance();
  RatFunc ix = to_ratfunc(t.inv_x), iy = to_ratfunc(t.inv_y);

  RatFunc ix10 = ctx.diff(ix, Dir::X), ix01 = ctx.diff(ix, Dir::Y);
  RatFunc iy10 = ctx.diff(iy, Dir::X), iy01 = ctx.diff(iy, Dir::Y);
  RatFunc detS = ix10 * iy01 - ix01 * iy10;
  if (detS.is_zero())
    throw TransformError("transformation is not locally invertible");

  std::map<AtomPtr, RatFunc> inv;
  inv[atom_x()] = ix;
  inv[atom_y()] = iy;
  RatFunc Pc = rf_subst(to_ratfunc(ode.P), inv);
  RatFunc Qc = rf_subst(to_ratfunc(ode.Q), inv);
  RatFunc Rc = rf_subst(to_ratfunc(ode.R), inv);
  RatFunc Sc = rf_subst(to_ratfunc(ode.S), inv);

  WPoly M{ix10, ix01};  // dx/dxt along the curve
  WPoly N{iy10, iy01};  // dy/dxt along the curve
  WPoly M2 = wp_mul(M, M), M3 = wp_mul(M2, M);
  WPoly N2 = wp_mul(N, N), N3 = wp_mul(N2, N);

  WPoly rhs = wp_scale(M3, Pc);
  rhs = wp_add(rhs, wp_scale(wp_mul(N, M2), Qc * Rational(3)));
  rhs = wp_add(rhs, wp_scale(wp_mul(N2, M), Rc * Rational(3)));
  rhs = wp_add(rhs, wp_scale(N3, Sc));
  WPoly bracket = wp_add(wp_mul(wp_total_derivative(N, ctx), M),
                         wp_neg(wp_mul(N, wp_total_derivative(M, ctx))));
  rhs = wp_add(rhs, wp_neg(bracket));

  WPoly cubic = wp_scale(rhs, RatFunc(Rational(1)) / detS);
  for (size_t k = 4; k < cubic.size(); ++k)
    if (!cubic[k].is_zero())
      throw TransformError(
          "internal error: transformed equation is not cubic in the first "
          "derivative");
  cubic.resize(4);

  OdeCoefficients out;
  out.P = to_expr(cubic[0]);
  out.Q = to_expr(cubic[1] / Rational(3));
  out.R = to_expr(cubic[2] / Rational(3));
  out.S = to_expr(cubic[3]);
  return out;
}

// --- pseudotensor fields ------------------------------------------------------

PseudoField PseudoField::scalar(Expr value, int weight) {
  return {0, 0, weight, {std::move(value)}};
}

PseudoField PseudoField::covector(Expr c1, Expr c2, int weight) {
  return {0, 1, weight, {std::move(c1), std::move(c2)}};
}

PseudoField PseudoField::vector(Expr c1, Expr c2, int weight) {
  return {1, 0, weight, {std::move(c1), std::move(c2)}};
}

PseudoField PseudoField::matrix_lower(std::array<std::array<Expr, 2>, 2> d,
                                      int weight) {
  return {0, 2, weight, {d[0][0], d[0][1], d[1][0], d[1][1]}};
}

PseudoField PseudoField::matrix_upper(std::array<std::array<Expr, 2>, 2> d,
                                      int weight) {
  return {2, 0, weight, {d[0][0], d[0][1], d[1][0], d[1][1]}};
}

namespace {

int field_rank(const PseudoField& f) { return f.r + f.s; }

}  // namespace

PseudoField transform_components(const PseudoField& tilde_field,
                                 const PointTransformation& t) {
  for (const auto& c : tilde_field.comps)
    for (const auto& a : to_ratfunc(c).atoms())
      if (a->kind == AtomKind::Opaque)
        throw TransformError(
            "cannot transform components containing opaque symbols");

  TransitionMatrices m = jacobians(t);
  std::map<AtomPtr, RatFunc> fwd;
  fwd[atom_x()] = to_ratfunc(t.fwd_x);
  fwd[atom_y()] = to_ratfunc(t.fwd_y);
  auto compose_fwd = [&](const Expr& e) { return rf_subst(to_ratfunc(e), fwd); };

  int rank = field_rank(tilde_field);
  RatFunc detT = to_ratfunc(m.detT);
  RatFunc weight_factor = rf_pow(detT, tilde_field.weight);

  PseudoField out;
  out.r = tilde_field.r;
  out.s = tilde_field.s;
  out.weight = tilde_field.weight;
  out.comps.resize(tilde_field.comps.size());
  for (size_t idx = 0; idx < out.comps.size(); ++idx) {
    RatFunc acc;
    for (size_t src = 0; src < tilde_field.comps.size(); ++src) {
      RatFunc term = compose_fwd(tilde_field.comps[src]);
      if (term.is_zero()) continue;
      for (int pos = 0; pos < rank; ++pos) {
        int shift = rank - 1 - pos;
        int own = static_cast<int>(idx >> shift) & 1;
        int other = static_cast<int>(src >> shift) & 1;
        // Upper indices contract with the direct matrix S (composed with the
        // forward map so everything is a function of x, y); lower ones with T.
        term = term * (pos < tilde_field.r
                           ? compose_fwd(m.Smat[own][other])
                           : to_ratfunc(m.Tmat[other][own]));
      }
      acc = acc + term;
    }
    out.comps[idx] = to_expr(acc * weight_factor);
  }
  return out;
}

std::vector<double> transform_components_at(
    const PseudoField& shape, const std::vector<double>& tilde_values,
    const std::array<std::array<double, 2>, 2>& Smat_at,
    const std::array<std::array<double, 2>, 2>& Tmat_at, double detT_at) {
  int rank = shape.r + shape.s;
  size_t n = size_t{1} << rank;
  assert(tilde_values.size() == n);
  double wfac = std::pow(detT_at, shape.weight);
  std::vector<double> out(n, 0.0);
  for (size_t idx = 0; idx < n; ++idx) {
    double acc = 0;
    for (size_t src = 0; src < n; ++src) {
      double term = tilde_values[src];
      for (int pos = 0; pos < rank; ++pos) {
        int shift = rank - 1 - pos;
        int own = static_cast<int>(idx >> shift) & 1;
        int other = static_cast<int>(src >> shift) & 1;
        term *= pos < shape.r ? Smat_at[own][other] : Tmat_at[other][own];
      }
      acc += term;
    }
    out[idx] = acc * wfac;
  }
  return out;
}

PseudoField raise_index(const PseudoField& covector) {
  if (covector.r != 0 || covector.s != 1)
    throw TransformError("raise_index needs a covector (valence (0,1))");
  PseudoField out;
  out.r = 1;
  out.s = 0;
  out.weight = covector.weight + 1;
  out.comps = {covector.comps[1], Expr::negate(covector.comps[0])};
  return out;
}

}  // namespace odeinv
