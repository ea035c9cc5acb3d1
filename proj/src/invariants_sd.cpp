#include "odeinv/invariants_sd.hpp"

#include <cmath>

namespace odeinv {

namespace {

const Rational kThird(1, 3);

}  // namespace

SdCovector covector_alpha(const OdeRf& o) {
  auto d = [&](const RatFunc& v, int px, int py) { return o.ctx->diff(v, px, py); };
  const RatFunc &P = o.P, &Q = o.Q, &R = o.R, &S = o.S;
  SdCovector ab;
  ab.A = d(P, 0, 2) - Rational(2) * d(Q, 1, 1) + d(R, 2, 0) +
         Rational(2) * P * d(S, 1, 0) + S * d(P, 1, 0) -
         Rational(3) * P * d(R, 0, 1) - Rational(3) * R * d(P, 0, 1) -
         Rational(3) * Q * d(R, 1, 0) + Rational(6) * Q * d(Q, 0, 1);
  ab.B = d(S, 2, 0) - Rational(2) * d(R, 1, 1) + d(Q, 0, 2) -
         Rational(2) * S * d(P, 0, 1) - P * d(S, 0, 1) +
         Rational(3) * S * d(Q, 1, 0) + Rational(3) * Q * d(S, 1, 0) +
         Rational(3) * R * d(Q, 0, 1) - Rational(6) * R * d(R, 1, 0);
  return ab;
}

SdCovectorBeta covector_beta(const OdeRf& o, const SdCovector& ab) {
  auto d = [&](const RatFunc& v, Dir dir) { return o.ctx->diff(v, dir); };
  const RatFunc &Q = o.Q, &R = o.R, &S = o.S, &P = o.P;
  const RatFunc &A = ab.A, &B = ab.B;
  RatFunc Ax = d(A, Dir::X), Ay = d(A, Dir::Y);
  RatFunc Bx = d(B, Dir::X), By = d(B, Dir::Y);
  SdCovectorBeta gh;
  gh.G = -B * Bx - Rational(3) * A * By + Rational(4) * B * Ay +
         Rational(3) * S * A * A - Rational(6) * R * B * A +
         Rational(3) * Q * B * B;
  gh.H = -A * Ay - Rational(3) * B * Ax + Rational(4) * A * Bx -
         Rational(3) * P * B * B + Rational(6) * Q * A * B -
         Rational(3) * R * A * A;
  return gh;
}

RatFunc pseudoscalar_F5(const OdeRf& o, const SdCovector& ab) {
  auto d = [&](const RatFunc& v, Dir dir) { return o.ctx->diff(v, dir); };
  const RatFunc &A = ab.A, &B = ab.B;
  RatFunc Ax = d(A, Dir::X), Ay = d(A, Dir::Y);
  RatFunc Bx = d(B, Dir::X), By = d(B, Dir::Y);
  return A * B * Ay + B * A * Bx - A * A * By - B * B * Ax - o.P * B * B * B +
         Rational(3) * o.Q * A * B * B - Rational(3) * o.R * A * A * B +
         o.S * A * A * A;
}

SdCore frame_and_connection(const OdeRf& o) {
  SdCore core;
  SdCovector ab = covector_alpha(o);
  SdCovectorBeta gh = covector_beta(o, ab);
  core.A = ab.A;
  core.B = ab.B;
  core.G = gh.G;
  core.H = gh.H;
  core.F5 = pseudoscalar_F5(o, ab);
  core.field = std::make_shared<const FExtField>(core.F5, *o.ctx);

  // dF/F, expressed rationally.
  RatFunc lx = core.field->dlog(Dir::X);
  RatFunc ly = core.field->dlog(Dir::Y);
  core.conn.g1_11 = o.Q + Rational(2) * kThird * lx;
  core.conn.g2_11 = -o.P;
  core.conn.g1_12 = o.R + kThird * ly;
  core.conn.g2_12 = -o.Q + kThird * lx;
  core.conn.g1_22 = o.S;
  core.conn.g2_22 = -o.R + Rational(2) * kThird * ly;

  FExt inv_f2 = FExt::root_pow(core.field, -2);
  FExt inv_f4 = FExt::root_pow(core.field, -4);
  core.X = {inv_f2 * core.B, inv_f2 * (-core.A)};
  core.Y = {inv_f4 * core.G, inv_f4 * core.H};
  return core;
}

SdScalars scalars_explicit(const SdCore& core, const OdeRf& o) {
  auto d = [&](const RatFunc& v, Dir dir) { return o.ctx->diff(v, dir); };
  const RatFunc &A = core.A, &B = core.B, &G = core.G, &H = core.H;
  const RatFunc &P = o.P, &Q = o.Q, &R = o.R, &S = o.S;
  RatFunc Ax = d(A, Dir::X), Ay = d(A, Dir::Y);
  RatFunc Bx = d(B, Dir::X), By = d(B, Dir::Y);
  RatFunc Gx = d(G, Dir::X), Gy = d(G, Dir::Y);
  RatFunc Hx = d(H, Dir::X), Hy = d(H, Dir::Y);

  const FExtFieldPtr& fld = core.field;
  FExt f = FExt::root_pow(fld, 1);
  FExt Fx = f.diff(Dir::X);
  FExt Fy = f.diff(Dir::Y);
  auto inv_pow = [&](int k) { return FExt::root_pow(fld, -k); };

  SdScalars s;

  RatFunc i3_rat = B * (H * Gx - G * Hx) - A * (H * Gy - G * Hy) +
                   B * G * G * P - (A * G * G - Rational(2) * H * B * G) * Q +
                   (B * H * H - Rational(2) * H * A * G) * R - A * H * H * S;
  s.I3 = inv_pow(9) * (i3_rat * kThird) +
         (H * Fy + G * Fx) * inv_pow(5) * RatFunc(kThird);

  RatFunc i6_long = A * (G * Ay + H * By) - B * (G * Ax + H * Bx) -
                    G * B * B * P - (H * B * B - Rational(2) * G * B * A) * Q -
                    (G * A * A - Rational(2) * H * B * A) * R - H * A * A * S;
  s.I6_alt = inv_pow(7) * (i6_long * Rational(1, 12)) -
             (A * Fy - B * Fx) * inv_pow(3) * RatFunc(Rational(1, 3));

  s.I6 = inv_pow(2) * ((Ay - Bx) * kThird) -
         (A * Fy - B * Fx) * inv_pow(3) * RatFunc(kThird);

  RatFunc i7_rat = G * H * Gx - G * G * Hx + H * H * Gy - H * G * Hy +
                   G * G * G * P + Rational(3) * G * G * H * Q +
                   Rational(3) * G * H * H * R + H * H * H * S;
  s.I7 = inv_pow(11) * (i7_rat * kThird);

  RatFunc i8_rat = G * (A * Gx + B * Hx) + H * (A * Gy + B * Hy) -
                   B * G * G * P + (A * G * G - Rational(2) * H * B * G) * Q -
                   (B * H * H - Rational(2) * H * A * G) * R + A * H * H * S;
  s.I8 = inv_pow(9) * (i8_rat * kThird) -
         (H * Fy + G * Fx) * inv_pow(5) * RatFunc(Rational(10, 3));

  s.I2 = FExt(fld, RatFunc(kThird));
  s.I1 = s.I6 * Rational(-4);
  s.I4 = s.I6 * Rational(4);
  s.I5 = -s.I8;
  s.L = s.I3 + s.I8;
  s.K = s.I6 * Rational(-3);
  return s;
}

FExt apply_operator(const std::array<FExt, 2>& field, const FExt& scalar) {
  return field[0] * scalar.diff(Dir::X) + field[1] * scalar.diff(Dir::Y);
}

std::array<FExt, 2> commutator(const std::array<FExt, 2>& V,
                               const std::array<FExt, 2>& W) {
  std::array<FExt, 2> c;
  for (int k = 0; k < 2; ++k)
    c[k] = V[0] * W[k].diff(Dir::X) + V[1] * W[k].diff(Dir::Y) -
           (W[0] * V[k].diff(Dir::X) + W[1] * V[k].diff(Dir::Y));
  return c;
}

std::pair<FExt, FExt> solve_in_frame(const std::array<FExt, 2>& U,
                                     const std::array<FExt, 2>& V,
                                     const std::array<FExt, 2>& W) {
  FExt det = V[0] * W[1] - V[1] * W[0];
  if (det.is_zero()) throw DegenerateError("frame is singular");
  FExt a = (U[0] * W[1] - U[1] * W[0]) / det;
  FExt b = (V[0] * U[1] - V[1] * U[0]) / det;
  return {a, b};
}

namespace {

// d(scale)/scale for a single-grade scale c*f^k, one entry per direction.
std::array<RatFunc, 2> scale_ratio(const FExt& scale, const DiffContext& ctx) {
  auto sg = scale.single_grade();
  if (!sg) throw KernelError("frame scale must be single-grade");
  std::array<RatFunc, 2> r;
  for (Dir d : {Dir::X, Dir::Y}) {
    RatFunc base = scale.field()->dlog(d) * Rational(sg->first);
    if (!sg->second.is_constant())
      base = base + ctx.diff(sg->second, d) / sg->second;
    r[static_cast<int>(d)] = base;
  }
  return r;
}

// Rational part of nabla_V W for scaled fields: the true derivative equals
// V.scale * W.scale times the returned components.
std::array<RatFunc, 2> covd_hat(const ScaledField& V, const ScaledField& W,
                                const Connection& conn,
                                const DiffContext& ctx) {
  std::array<RatFunc, 2> ratio = scale_ratio(W.scale, ctx);
  std::array<std::array<RatFunc, 2>, 2> g1{
      {{conn.g1_11, conn.g1_12}, {conn.g1_12, conn.g1_22}}};
  std::array<std::array<RatFunc, 2>, 2> g2{
      {{conn.g2_11, conn.g2_12}, {conn.g2_12, conn.g2_22}}};
  std::array<RatFunc, 2> out;
  for (int k = 0; k < 2; ++k) {
    RatFunc acc;
    for (int i = 0; i < 2; ++i)
      acc = acc + V.hat[i] * (ctx.diff(W.hat[k], static_cast<Dir>(i)) +
                              W.hat[k] * ratio[i]);
    const auto& g = k == 0 ? g1 : g2;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc = acc + V.hat[i] * W.hat[j] * g[i][j];
    out[k] = acc;
  }
  return out;
}

// Solves (dress * U_hat) = a A + b B for scaled frame fields A, B, where
// dress is the product of the scales U_hat was stripped of.
std::pair<FExt, FExt> solve_hat(const std::array<RatFunc, 2>& U_hat,
                                const FExt& dress, const ScaledField& A,
                                const ScaledField& B) {
  RatFunc det = A.hat[0] * B.hat[1] - A.hat[1] * B.hat[0];
  if (det.is_zero()) throw DegenerateError("frame is singular");
  RatFunc p = (U_hat[0] * B.hat[1] - U_hat[1] * B.hat[0]) / det;
  RatFunc q = (A.hat[0] * U_hat[1] - A.hat[1] * U_hat[0]) / det;
  FExt a = dress * p / A.scale;
  FExt b = dress * q / B.scale;
  return {a, b};
}

}  // namespace

std::array<FExt, 2> assemble(const ScaledField& f) {
  return {f.scale * f.hat[0], f.scale * f.hat[1]};
}

std::pair<FExt, FExt> commutator_in_frame(const ScaledField& V,
                                          const ScaledField& W,
                                          const DiffContext& ctx) {
  std::array<RatFunc, 2> rv = scale_ratio(V.scale, ctx);
  std::array<RatFunc, 2> rw = scale_ratio(W.scale, ctx);
  std::array<RatFunc, 2> c;
  for (int k = 0; k < 2; ++k) {
    RatFunc acc;
    for (int i = 0; i < 2; ++i) {
      acc = acc + V.hat[i] * (ctx.diff(W.hat[k], static_cast<Dir>(i)) +
                              W.hat[k] * rw[i]);
      acc = acc - W.hat[i] * (ctx.diff(V.hat[k], static_cast<Dir>(i)) +
                              V.hat[k] * rv[i]);
    }
    c[k] = acc;
  }
  return solve_hat(c, V.scale * W.scale, V, W);
}

SdScalars scalars_via_connection(const SdCore& core, const OdeRf& o) {
  const FExtFieldPtr& fld = core.field;
  ScaledField X{{core.B, -core.A}, FExt::root_pow(fld, -2)};
  ScaledField Y{{core.G, core.H}, FExt::root_pow(fld, -4)};
  const DiffContext& ctx = *o.ctx;

  SdScalars s;
  auto solve = [&](const ScaledField& V, const ScaledField& W) {
    return solve_hat(covd_hat(V, W, core.conn, ctx), V.scale * W.scale, X, Y);
  };
  std::tie(s.I1, s.I2) = solve(X, X);
  std::tie(s.I3, s.I4) = solve(X, Y);
  std::tie(s.I5, s.I6) = solve(Y, X);
  std::tie(s.I7, s.I8) = solve(Y, Y);
  auto [l, mk] = commutator_in_frame(X, Y, ctx);
  s.L = l;
  s.K = -mk;
  s.I6_alt = s.I6;
  return s;
}

SdPointEvaluator::SdPointEvaluator(const OdeRf& o)
    : P_(o.P), Q_(o.Q), R_(o.R), S_(o.S) {
  SdCovector ab = covector_alpha(o);
  SdCovectorBeta gh = covector_beta(o, ab);
  A_ = ab.A;
  B_ = ab.B;
  G_ = gh.G;
  H_ = gh.H;
  F5_ = pseudoscalar_F5(o, ab);
  auto d = [&](const RatFunc& v, Dir dir) { return o.ctx->diff(v, dir); };
  Ax_ = d(A_, Dir::X);
  Ay_ = d(A_, Dir::Y);
  Bx_ = d(B_, Dir::X);
  By_ = d(B_, Dir::Y);
  Gx_ = d(G_, Dir::X);
  Gy_ = d(G_, Dir::Y);
  Hx_ = d(H_, Dir::X);
  Hy_ = d(H_, Dir::Y);
  F5x_ = d(F5_, Dir::X);
  F5y_ = d(F5_, Dir::Y);
}

double SdPointEvaluator::Scalar::value(double root) const {
  double v = c.get_d();
  for (int i = 0; i < grade; ++i) v *= root;
  return v;
}

SdPointEvaluator::Values SdPointEvaluator::at(const Rational& x,
                                              const Rational& y) const {
  auto bind = [&](const AtomPtr& a) -> Rational {
    if (a == atom_x()) return x;
    if (a == atom_y()) return y;
    throw EvalError("unbound symbol in coefficient");
  };
  auto ev = [&](const RatFunc& r) { return rf_eval(r, bind); };
  Rational A = ev(A_), B = ev(B_), G = ev(G_), H = ev(H_);
  Rational P = ev(P_), Q = ev(Q_), R = ev(R_), S = ev(S_);
  Rational Ay = ev(Ay_), Bx = ev(Bx_);
  Rational Gx = ev(Gx_), Gy = ev(Gy_), Hx = ev(Hx_), Hy = ev(Hy_);
  Rational m = ev(F5_);
  if (m == 0) throw EvalError("F^5 vanishes at the point");
  Rational mx = ev(F5x_), my = ev(F5y_);
  Rational m2 = m * m, m3 = m2 * m;

  // Each closed form is a rational function of the chain values times a pure
  // power of F; dF = dF^5/(5 F^4) turns every F-derivative term rational.
  Values out;
  out.F5 = m;
  Rational i3_rat = B * (H * Gx - G * Hx) - A * (H * Gy - G * Hy) +
                    B * G * G * P - (A * G * G - 2 * H * B * G) * Q +
                    (B * H * H - 2 * H * A * G) * R - A * H * H * S;
  out.I3 = {(i3_rat + (H * my + G * mx) / 5) / (3 * m2), 1};
  out.I6 = {(Ay - Bx) / (3 * m) - (A * my - B * mx) / (15 * m2), 3};
  Rational i7_rat = G * H * Gx - G * G * Hx + H * H * Gy - H * G * Hy +
                    G * G * G * P + 3 * G * G * H * Q + 3 * G * H * H * R +
                    H * H * H * S;
  out.I7 = {i7_rat / (3 * m3), 4};
  Rational i8_rat = G * (A * Gx + B * Hx) + H * (A * Gy + B * Hy) -
                    B * G * G * P + (A * G * G - 2 * H * B * G) * Q -
                    (B * H * H - 2 * H * A * G) * R + A * H * H * S;
  out.I8 = {(i8_rat - 2 * (H * my + G * mx)) / (3 * m2), 1};
  out.L = {out.I3.c + out.I8.c, 1};
  out.K = {out.I6.c * Rational(-3), 3};
  return out;
}

bool root_multiples_equal(const SdPointEvaluator::Scalar& a,
                          const Rational& f5_a,
                          const SdPointEvaluator::Scalar& b,
                          const Rational& f5_b) {
  // a.c F_a^g = b.c F_b^g over the reals iff the fifth powers agree.
  auto pow5 = [](const Rational& v) -> Rational {
    Rational r = v * v;
    r = r * r;
    return r * v;
  };
  auto ipow = [](const Rational& v, int e) -> Rational {
    Rational r(1);
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  };
  if (a.grade != b.grade) return false;
  return pow5(a.c) * ipow(f5_a, a.grade) == pow5(b.c) * ipow(f5_b, b.grade);
}

}  // namespace odeinv
