#include "odeinv/corpus.hpp"

#include <random>

namespace odeinv {

namespace {

Expr random_poly(std::mt19937_64& rng, int degree, int bound) {
  std::uniform_int_distribution<int> coeff(-bound, bound);
  std::vector<Expr> terms;
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) {
      int c = coeff(rng);
      if (c == 0) continue;
      terms.push_back(Expr::product(
          {Expr::number(c), Expr::pow(Expr::x(), i), Expr::pow(Expr::y(), j)}));
    }
  }
  return Expr::sum(std::move(terms));
}

}  // namespace

std::vector<OdeCoefficients> random_polynomial_odes(uint64_t seed, int n,
                                                    int degree,
                                                    int coeff_bound) {
  std::mt19937_64 rng(seed ^ 0x8f1bbcdcbfa53e0bull);
  std::vector<OdeCoefficients> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    OdeCoefficients ode;
    ode.P = random_poly(rng, degree, coeff_bound);
    ode.Q = random_poly(rng, degree, coeff_bound);
    ode.R = random_poly(rng, degree, coeff_bound);
    ode.S = random_poly(rng, degree, coeff_bound);
    out.push_back(std::move(ode));
  }
  return out;
}

OdeCoefficients fixed_zero_ode() { return OdeCoefficients::zero(); }

OdeCoefficients fixed_px2_ode() {
  return OdeCoefficients::from_strings("1", "0", "0", "x^2");
}

OdeCoefficients fixed_py2_ode() {
  return OdeCoefficients::from_strings("y^2", "0", "0", "0");
}

std::vector<OdeCoefficients> acceptance_corpus(uint64_t seed, int n,
                                               int degree) {
  std::vector<OdeCoefficients> out{fixed_zero_ode(), fixed_px2_ode(),
                                   fixed_py2_ode()};
  auto rnd = random_polynomial_odes(seed, n, degree);
  out.insert(out.end(), rnd.begin(), rnd.end());
  return out;
}

std::vector<PointTransformation> random_affine_maps(uint64_t seed, int n) {
  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
  std::uniform_int_distribution<int> entry(-3, 3);
  std::vector<PointTransformation> out;
  while (static_cast<int>(out.size()) < n) {
    long a = entry(rng), b = entry(rng), c = entry(rng), d = entry(rng);
    long e = entry(rng), f = entry(rng);
    long det = a * d - b * c;
    if (det == 0) continue;
    PointTransformation t;
    // xt = a x + b y + e, yt = c x + d y + f
    t.fwd_x = Expr::number(a) * Expr::x() + Expr::number(b) * Expr::y() +
              Expr::number(e);
    t.fwd_y = Expr::number(c) * Expr::x() + Expr::number(d) * Expr::y() +
              Expr::number(f);
    Expr dx = Expr::x() - Expr::number(e);  // xt - e, in the tilde chart
    Expr dy = Expr::y() - Expr::number(f);
    Rational inv_det(1, det);
    inv_det.canonicalize();
    t.inv_x = Expr::number(inv_det) *
              (Expr::number(d) * dx - Expr::number(b) * dy);
    t.inv_y = Expr::number(inv_det) *
              (Expr::number(-c) * dx + Expr::number(a) * dy);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PointTransformation> fixed_nonlinear_maps() {
  return {
      PointTransformation::parse_file("xt = x\n"
                                      "yt = y + x^2\n"
                                      "x = xt\n"
                                      "y = yt - xt^2\n"),
      PointTransformation::parse_file("xt = y\n"
                                      "yt = x\n"
                                      "x = yt\n"
                                      "y = xt\n"),
      PointTransformation::parse_file("xt = x + y^3\n"
                                      "yt = y\n"
                                      "x = xt - yt^3\n"
                                      "y = yt\n"),
      PointTransformation::parse_file("xt = x + y + y^2\n"
                                      "yt = y\n"
                                      "x = xt - yt - yt^2\n"
                                      "y = yt\n"),
      PointTransformation::parse_file("xt = 2*x + y^2\n"
                                      "yt = y + 1\n"
                                      "x = (xt - (yt - 1)^2)/2\n"
                                      "y = yt - 1\n"),
  };
}

}  // namespace odeinv
