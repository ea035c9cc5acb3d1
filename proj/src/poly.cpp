#include "odeinv/poly.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace odeinv {

int Monomial::degree_of(const AtomPtr& a) const {
  for (const auto& [atom, e] : factors)
    if (atom == a) return e;
  return 0;
}

int Monomial::total_degree() const {
  int d = 0;
  for (const auto& [atom, e] : factors) d += e;
  return d;
}

int mono_cmp(const Monomial& a, const Monomial& b) {
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    const auto& fa = a.factors[i];
    const auto& fb = b.factors[j];
    if (fa.first == fb.first) {
      if (fa.second != fb.second) return fa.second > fb.second ? 1 : -1;
      ++i, ++j;
    } else if (atom_lt(fa.first, fb.first)) {
      return 1;  // a has a positive power of an earlier atom
    } else {
      return -1;
    }
  }
  if (i < a.factors.size()) return 1;
  if (j < b.factors.size()) return -1;
  return 0;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.factors.reserve(a.factors.size() + b.factors.size());
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    const auto& fa = a.factors[i];
    const auto& fb = b.factors[j];
    if (fa.first == fb.first) {
      r.factors.emplace_back(fa.first, fa.second + fb.second);
      ++i, ++j;
    } else if (atom_lt(fa.first, fb.first)) {
      r.factors.push_back(fa);
      ++i;
    } else {
      r.factors.push_back(fb);
      ++j;
    }
  }
  for (; i < a.factors.size(); ++i) r.factors.push_back(a.factors[i]);
  for (; j < b.factors.size(); ++j) r.factors.push_back(b.factors[j]);
  return r;
}

Monomial mono_gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < a.factors.size() && j < b.factors.size()) {
    const auto& fa = a.factors[i];
    const auto& fb = b.factors[j];
    if (fa.first == fb.first) {
      r.factors.emplace_back(fa.first, std::min(fa.second, fb.second));
      ++i, ++j;
    } else if (atom_lt(fa.first, fb.first)) {
      ++i;
    } else {
      ++j;
    }
  }
  return r;
}

bool mono_divides(const Monomial& b, const Monomial& a) {
  size_t i = 0;
  for (const auto& fb : b.factors) {
    while (i < a.factors.size() && atom_lt(a.factors[i].first, fb.first)) ++i;
    if (i >= a.factors.size() || a.factors[i].first != fb.first ||
        a.factors[i].second < fb.second)
      return false;
  }
  return true;
}

Monomial mono_div(const Monomial& a, const Monomial& b) {
  Monomial r;
  size_t i = 0;
  for (const auto& fa : a.factors) {
    if (i < b.factors.size() && b.factors[i].first == fa.first) {
      int e = fa.second - b.factors[i].second;
      assert(e >= 0);
      if (e > 0) r.factors.emplace_back(fa.first, e);
      ++i;
    } else {
      r.factors.push_back(fa);
    }
  }
  assert(i == b.factors.size());
  return r;
}

Poly Poly::constant(const Rational& c) {
  Poly p;
  if (c != 0) p.terms.emplace_back(Monomial{}, c);
  return p;
}

Poly Poly::from_atom(const AtomPtr& a, int exp) {
  assert(exp > 0);
  Poly p;
  Monomial m;
  m.factors.emplace_back(a, exp);
  p.terms.emplace_back(std::move(m), Rational(1));
  return p;
}

Poly Poly::from_monomial(Monomial m, const Rational& c) {
  Poly p;
  if (c != 0) p.terms.emplace_back(std::move(m), c);
  return p;
}

bool Poly::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms[0].first.is_one());
}

bool Poly::is_one() const {
  return terms.size() == 1 && terms[0].first.is_one() && terms[0].second == 1;
}

Rational Poly::constant_value() const {
  assert(is_constant());
  return terms.empty() ? Rational(0) : terms[0].second;
}

int Poly::degree_in(const AtomPtr& a) const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, m.degree_of(a));
  return d;
}

std::set<AtomPtr> Poly::atoms() const {
  std::set<AtomPtr> s;
  for (const auto& [m, c] : terms)
    for (const auto& [a, e] : m.factors) s.insert(a);
  return s;
}

bool Poly::operator==(const Poly& o) const {
  if (terms.size() != o.terms.size()) return false;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].second != o.terms[i].second) return false;
    if (mono_cmp(terms[i].first, o.terms[i].first) != 0) return false;
  }
  return true;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  r.terms.reserve(a.terms.size() + b.terms.size());
  size_t i = 0, j = 0;
  while (i < a.terms.size() && j < b.terms.size()) {
    int c = mono_cmp(a.terms[i].first, b.terms[j].first);
    if (c > 0) {
      r.terms.push_back(a.terms[i++]);
    } else if (c < 0) {
      r.terms.push_back(b.terms[j++]);
    } else {
      Rational sum = a.terms[i].second + b.terms[j].second;
      if (sum != 0) r.terms.emplace_back(a.terms[i].first, std::move(sum));
      ++i, ++j;
    }
  }
  for (; i < a.terms.size(); ++i) r.terms.push_back(a.terms[i]);
  for (; j < b.terms.size(); ++j) r.terms.push_back(b.terms[j]);
  return r;
}

namespace {

// Sorts term records in place and combines equal monomials.
void sort_and_combine(std::vector<std::pair<Monomial, Rational>>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) {
              return mono_cmp(x.first, y.first) > 0;
            });
  size_t out = 0;
  for (size_t i = 0; i < terms.size();) {
    size_t j = i + 1;
    while (j < terms.size() && mono_cmp(terms[i].first, terms[j].first) == 0) {
      terms[i].second += terms[j].second;
      ++j;
    }
    if (terms[i].second != 0) {
      if (out != i) terms[out] = std::move(terms[i]);
      ++out;
    }
    i = j;
  }
  terms.resize(out);
}

}  // namespace

Poly operator-(const Poly& a) {
  Poly r = a;
  for (auto& [m, c] : r.terms) c = -c;
  return r;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Rational& c) {
  if (c == 0) return Poly{};
  Poly r = a;
  for (auto& [m, k] : r.terms) k *= c;
  return r;
}

namespace {

Poly mul_by_term(const Poly& a, const Monomial& m, const Rational& c) {
  Poly r;
  r.terms.reserve(a.terms.size());
  for (const auto& [am, ac] : a.terms)
    r.terms.emplace_back(mono_mul(am, m), ac * c);
  return r;
}

}  // namespace

namespace {

// True when every atom of p is one of the two coordinates.
bool is_xy_only(const Poly& p, int& dx, int& dy) {
  dx = dy = 0;
  for (const auto& [m, c] : p.terms) {
    for (const auto& [a, e] : m.factors) {
      if (a == atom_x())
        dx = std::max(dx, e);
      else if (a == atom_y())
        dy = std::max(dy, e);
      else
        return false;
    }
  }
  return true;
}

// Dense integer convolution for coordinate polynomials: clear denominators,
// multiply with mpz_addmul, and rebuild the sparse form. Far cheaper than
// sparse merging for the mid-size bivariate polynomials the invariant chains
// produce.
Poly dense_xy_mul(const Poly& a, const Poly& b, int dxa, int dya, int dxb,
                  int dyb) {
  mpz_class da = 1, db = 1;
  for (const auto& [m, c] : a.terms)
    mpz_lcm(da.get_mpz_t(), da.get_mpz_t(), c.get_den().get_mpz_t());
  for (const auto& [m, c] : b.terms)
    mpz_lcm(db.get_mpz_t(), db.get_mpz_t(), c.get_den().get_mpz_t());

  int wa = dya + 1, wb = dyb + 1;
  int dxr = dxa + dxb, dyr = dya + dyb;
  int wr = dyr + 1;
  std::vector<mpz_class> va(static_cast<size_t>(dxa + 1) * wa);
  std::vector<mpz_class> vb(static_cast<size_t>(dxb + 1) * wb);
  std::vector<std::pair<int, int>> ta, tb;  // occupied slots
  ta.reserve(a.terms.size());
  tb.reserve(b.terms.size());
  auto load = [](const Poly& p, std::vector<mpz_class>& v,
                 std::vector<std::pair<int, int>>& occ, int w,
                 const mpz_class& scale) {
    for (const auto& [m, c] : p.terms) {
      int ex = 0, ey = 0;
      for (const auto& [atom, e] : m.factors)
        (atom == atom_x() ? ex : ey) = e;
      mpz_class& slot = v[static_cast<size_t>(ex) * w + ey];
      mpz_divexact(slot.get_mpz_t(), scale.get_mpz_t(),
                   c.get_den().get_mpz_t());
      slot *= c.get_num();
      occ.emplace_back(ex, ey);
    }
  };
  load(a, va, ta, wa, da);
  load(b, vb, tb, wb, db);

  std::vector<mpz_class> prod(static_cast<size_t>(dxr + 1) * wr);
  for (const auto& [ax, ay] : ta) {
    const mpz_class& ca = va[static_cast<size_t>(ax) * wa + ay];
    for (const auto& [bx, by] : tb) {
      mpz_addmul(prod[static_cast<size_t>(ax + bx) * wr + (ay + by)].get_mpz_t(),
                 ca.get_mpz_t(),
                 vb[static_cast<size_t>(bx) * wb + by].get_mpz_t());
    }
  }

  mpz_class den = da * db;
  Poly r;
  for (int ex = dxr; ex >= 0; --ex) {
    for (int ey = dyr; ey >= 0; --ey) {
      mpz_class& c = prod[static_cast<size_t>(ex) * wr + ey];
      if (c == 0) continue;
      Rational q(c, den);
      q.canonicalize();
      Monomial m;
      if (ex) m.factors.emplace_back(atom_x(), ex);
      if (ey) m.factors.emplace_back(atom_y(), ey);
      r.terms.emplace_back(std::move(m), std::move(q));
    }
  }
  return r;
}

}  // namespace

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly{};
  if (b.terms.size() == 1) return mul_by_term(a, b.terms[0].first, b.terms[0].second);
  if (a.terms.size() == 1) return mul_by_term(b, a.terms[0].first, a.terms[0].second);
  int dxa, dya, dxb, dyb;
  if (is_xy_only(a, dxa, dya) && is_xy_only(b, dxb, dyb) &&
      static_cast<long>(dxa + dxb + 1) * (dya + dyb + 1) <= (1 << 16))
    return dense_xy_mul(a, b, dxa, dya, dxb, dyb);
  Poly r;
  r.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& [am, ac] : a.terms)
    for (const auto& [bm, bc] : b.terms)
      r.terms.emplace_back(mono_mul(am, bm), ac * bc);
  sort_and_combine(r.terms);
  return r;
}

Poly poly_pow(const Poly& a, int e) {
  assert(e >= 0);
  Poly r = Poly::constant(1);
  Poly base = a;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return r;
}

std::optional<Poly> poly_try_div(const Poly& a, const Poly& b) {
  assert(!b.is_zero());
  if (a.is_zero()) return Poly{};
  if (b.is_one()) return a;
  Poly rem = a;
  Poly quot;
  while (!rem.is_zero()) {
    const auto& [lm, lc] = rem.terms.front();
    if (!mono_divides(b.leading_monomial(), lm)) return std::nullopt;
    Monomial qm = mono_div(lm, b.leading_monomial());
    Rational qc = lc / b.leading_coeff();
    quot.terms.emplace_back(qm, qc);
    rem = rem - mul_by_term(b, qm, qc);
  }
  // Terms were appended in strictly descending order by construction.
  return quot;
}

Poly poly_formal_partial(const Poly& p, const AtomPtr& a) {
  Poly r;
  for (const auto& [m, c] : p.terms) {
    int e = m.degree_of(a);
    if (e == 0) continue;
    Monomial dm;
    dm.factors.reserve(m.factors.size());
    for (const auto& [atom, k] : m.factors) {
      int nk = atom == a ? k - 1 : k;
      if (nk > 0) dm.factors.emplace_back(atom, nk);
    }
    r = r + Poly::from_monomial(std::move(dm), c * e);
  }
  return r;
}

Rational poly_unit_content(const Poly& p) {
  if (p.is_zero()) return Rational(1);
  mpz_class num_gcd = 0, den_lcm = 1;
  for (const auto& [m, c] : p.terms) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(),
            c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
            c.get_den().get_mpz_t());
  }
  Rational content(num_gcd, den_lcm);
  content.canonicalize();
  if (p.leading_coeff() < 0) content = -content;
  return content;
}

namespace {

// --- gcd machinery ---------------------------------------------------------

Poly strip_unit(const Poly& p) {
  if (p.is_zero()) return p;
  Rational c = poly_unit_content(p);
  Poly r = p;
  for (auto& [m, k] : r.terms) k /= c;
  return r;
}

// Common monomial factor of all terms.
Monomial poly_mono_content(const Poly& p) {
  Monomial g = p.terms.front().first;
  for (size_t i = 1; i < p.terms.size() && !g.is_one(); ++i)
    g = mono_gcd(g, p.terms[i].first);
  return g;
}

Poly div_by_mono(const Poly& p, const Monomial& m) {
  if (m.is_one()) return p;
  Poly r;
  r.terms.reserve(p.terms.size());
  for (const auto& [pm, c] : p.terms) r.terms.emplace_back(mono_div(pm, m), c);
  return r;
}

// --- modular degree probe ----------------------------------------------------
//
// Images mod a word-size prime give a sound upper bound on the gcd degree in
// the chosen variable: for evaluation points and primes that preserve both
// leading coefficients, the image of the true gcd divides the image gcd, so a
// degree-0 image proves coprimality. The probe never decides a nonzero gcd by
// itself; candidates are verified by exact division.

constexpr uint64_t kProbePrimes[] = {4611686018427387847ull,
                                     4611686018427387817ull,
                                     4611686018427387787ull};

constexpr uint64_t kLiftPrimes[] = {
    4611686018427387847ull, 4611686018427387817ull, 4611686018427387787ull,
    4611686018427387761ull, 4611686018427387751ull, 4611686018427387737ull,
    4611686018427387733ull, 4611686018427387709ull, 4611686018427387701ull,
    4611686018427387631ull};

uint64_t mod_mul(uint64_t a, uint64_t b, uint64_t p) {
  return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

uint64_t mod_pow(uint64_t a, uint64_t e, uint64_t p) {
  uint64_t r = 1;
  while (e) {
    if (e & 1) r = mod_mul(r, a, p);
    a = mod_mul(a, a, p);
    e >>= 1;
  }
  return r;
}

uint64_t mod_inv(uint64_t a, uint64_t p) { return mod_pow(a, p - 2, p); }

// Rational coefficient mod p; empty when the denominator vanishes mod p.
std::optional<uint64_t> rational_mod(const Rational& q, uint64_t p) {
  uint64_t num = mpz_fdiv_ui(q.get_num().get_mpz_t(), p);
  if (mpz_cmp_ui(q.get_den().get_mpz_t(), 1) == 0) return num;
  uint64_t den = mpz_fdiv_ui(q.get_den().get_mpz_t(), p);
  if (den == 0) return std::nullopt;
  return mod_mul(num, mod_inv(den, p), p);
}

// Dense univariate image of p in v, with every other atom evaluated at the
// given residues. Empty on a denominator clash with the prime.
std::optional<std::vector<uint64_t>> poly_image_mod(
    const Poly& poly, const AtomPtr& v,
    const std::map<const AtomData*, uint64_t>& point, uint64_t prime) {
  std::vector<uint64_t> img(static_cast<size_t>(poly.degree_in(v)) + 1, 0);
  for (const auto& [m, c] : poly.terms) {
    auto coeff = rational_mod(c, prime);
    if (!coeff) return std::nullopt;
    uint64_t acc = *coeff;
    int ve = 0;
    for (const auto& [a, e] : m.factors) {
      if (a == v) {
        ve = e;
      } else {
        acc = mod_mul(acc, mod_pow(point.at(a.get()), e, prime), prime);
      }
    }
    img[ve] = (img[ve] + acc) % prime;
  }
  while (img.size() > 1 && img.back() == 0) img.pop_back();
  return img;
}

int image_gcd_degree(std::vector<uint64_t> a, std::vector<uint64_t> b,
                     uint64_t p) {
  auto trim = [](std::vector<uint64_t>& v) {
    while (v.size() > 1 && v.back() == 0) v.pop_back();
  };
  while (!(b.size() == 1 && b[0] == 0)) {
    // a mod b
    uint64_t lb = mod_inv(b.back(), p);
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
      uint64_t q = mod_mul(a.back(), lb, p);
      size_t off = a.size() - b.size();
      for (size_t i = 0; i < b.size(); ++i) {
        uint64_t sub = mod_mul(q, b[i], p);
        a[off + i] = (a[off + i] + p - sub) % p;
      }
      trim(a);
      if (a.size() == 1 && a[0] == 0) break;
    }
    std::swap(a, b);
    trim(b);
  }
  return static_cast<int>(a.size()) - 1;
}

// Remainder a mod b for dense univariate images mod p (in place), monic-ready.
std::vector<uint64_t> image_monic_gcd(std::vector<uint64_t> a,
                                      std::vector<uint64_t> b, uint64_t p) {
  auto trim = [](std::vector<uint64_t>& v) {
    while (v.size() > 1 && v.back() == 0) v.pop_back();
  };
  trim(a);
  trim(b);
  while (!(b.size() == 1 && b[0] == 0)) {
    uint64_t lb = mod_inv(b.back(), p);
    while (a.size() >= b.size() && !(a.size() == 1 && a[0] == 0)) {
      uint64_t q = mod_mul(a.back(), lb, p);
      size_t off = a.size() - b.size();
      for (size_t i = 0; i < b.size(); ++i)
        a[off + i] = (a[off + i] + p - mod_mul(q, b[i], p)) % p;
      trim(a);
      if (a.size() == 1 && a[0] == 0) break;
    }
    std::swap(a, b);
    trim(b);
  }
  uint64_t inv = mod_inv(a.back(), p);
  for (auto& c : a) c = mod_mul(c, inv, p);
  return a;
}

// Upper bound for deg_v(gcd(a,b)), or -1 when no usable image was found.
int gcd_degree_bound(const Poly& a, const Poly& b, const AtomPtr& v) {
  std::set<AtomPtr> others;
  for (const auto& s : {a.atoms(), b.atoms()})
    for (const auto& atom : s)
      if (atom != v) others.insert(atom);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  int best = -1;
  for (uint64_t prime : kProbePrimes) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      std::map<const AtomData*, uint64_t> point;
      for (const auto& atom : others)
        point[atom.get()] = 2 + rng() % (prime - 3);
      auto ia = poly_image_mod(a, v, point, prime);
      auto ib = poly_image_mod(b, v, point, prime);
      if (!ia || !ib) break;  // prime divides a denominator; next prime
      // The leading coefficient must survive for the bound to be valid.
      if (static_cast<int>(ia->size()) - 1 != a.degree_in(v)) continue;
      if (static_cast<int>(ib->size()) - 1 != b.degree_in(v)) continue;
      int d = image_gcd_degree(*ia, *ib, prime);
      if (best < 0 || d < best) best = d;
      if (best == 0) return 0;
    }
    if (best >= 0) return best;
  }
  return best;
}

Poly gcd_impl(Poly a, Poly b);

// --- Brown-style modular gcd (one or two atoms) ------------------------------
//
// Computes gcd images modulo word-size primes, interpolating over the second
// atom when present, lifts by CRT with symmetric representatives, and accepts
// only candidates that exactly divide both inputs. Inputs must be primitive
// integer polynomials free of content in the main atom.

mpz_class crt_pair(const mpz_class& r1, const mpz_class& m1, uint64_t r2,
                   uint64_t p) {
  // x = r1 (mod m1), x = r2 (mod p); m1 and p coprime.
  mpz_class pm(static_cast<unsigned long>(p));
  mpz_class diff = (mpz_class(static_cast<unsigned long>(r2)) - r1) % pm;
  if (diff < 0) diff += pm;
  mpz_class m1_inv;
  mpz_invert(m1_inv.get_mpz_t(), m1.get_mpz_t(), pm.get_mpz_t());
  mpz_class k = (diff * m1_inv) % pm;
  return r1 + m1 * k;
}

std::optional<uint64_t> poly_eval_mod(const Poly& p, uint64_t w_val,
                                      const AtomPtr& w, uint64_t prime) {
  uint64_t acc = 0;
  for (const auto& [m, c] : p.terms) {
    auto coeff = rational_mod(c, prime);
    if (!coeff) return std::nullopt;
    uint64_t t = *coeff;
    for (const auto& [atom, e] : m.factors) {
      if (atom != w) return std::nullopt;  // unexpected extra atom
      t = mod_mul(t, mod_pow(w_val, e, prime), prime);
    }
    acc = (acc + t) % prime;
  }
  return acc;
}

// Dense image of p(v, w) at w = w_val, coefficients by power of v.
std::optional<std::vector<uint64_t>> poly_image_at(const Poly& p,
                                                   const AtomPtr& v,
                                                   const AtomPtr& w,
                                                   uint64_t w_val,
                                                   uint64_t prime) {
  std::vector<uint64_t> img(static_cast<size_t>(p.degree_in(v)) + 1, 0);
  for (const auto& [m, c] : p.terms) {
    auto coeff = rational_mod(c, prime);
    if (!coeff) return std::nullopt;
    uint64_t t = *coeff;
    int ve = 0;
    for (const auto& [atom, e] : m.factors) {
      if (atom == v)
        ve = e;
      else if (atom == w)
        t = mod_mul(t, mod_pow(w_val, e, prime), prime);
      else
        return std::nullopt;
    }
    img[ve] = (img[ve] + t) % prime;
  }
  return img;
}

// Candidate gcd coefficients mod one prime, as a matrix [v power][w power].
std::optional<std::vector<std::vector<uint64_t>>> modular_gcd_image(
    const Poly& a, const Poly& b, const AtomPtr& v, const AtomPtr& w,
    const Poly& gamma, int dw_count, uint64_t prime, std::mt19937_64& rng,
    int& dv_out) {
  // Newton interpolation state: nodes and divided-difference vectors.
  std::vector<uint64_t> nodes;
  std::vector<std::vector<uint64_t>> dd;
  int dv = -1;
  int guard = 0;
  while (static_cast<int>(nodes.size()) < dw_count) {
    if (++guard > 40 * dw_count + 100) return std::nullopt;
    uint64_t w0 = 2 + rng() % (prime - 3);
    bool dup = false;
    for (uint64_t n : nodes) dup |= n == w0;
    if (dup) continue;
    auto ia = poly_image_at(a, v, w, w0, prime);
    auto ib = poly_image_at(b, v, w, w0, prime);
    if (!ia || !ib) return std::nullopt;
    // The evaluation must preserve both leading coefficients.
    if (ia->back() == 0 || ib->back() == 0) continue;
    std::vector<uint64_t> g = image_monic_gcd(*ia, *ib, prime);
    int d = static_cast<int>(g.size()) - 1;
    if (dv >= 0 && d > dv) continue;  // unlucky point
    if (dv < 0 || d < dv) {
      // First point, or every previous point was unlucky: restart.
      dv = d;
      nodes.clear();
      dd.clear();
    }
    auto gw = poly_eval_mod(gamma, w0, w, prime);
    if (!gw) return std::nullopt;
    if (*gw == 0) continue;
    for (auto& c : g) c = mod_mul(c, *gw, prime);
    // Divided differences against the existing nodes.
    std::vector<uint64_t> t = std::move(g);
    t.resize(static_cast<size_t>(dv) + 1, 0);
    for (size_t j = 0; j < nodes.size(); ++j) {
      uint64_t denom = (w0 + prime - nodes[j]) % prime;
      uint64_t inv = mod_inv(denom, prime);
      for (size_t k = 0; k <= static_cast<size_t>(dv); ++k) {
        uint64_t diff = (t[k] + prime - (k < dd[j].size() ? dd[j][k] : 0)) % prime;
        t[k] = mod_mul(diff, inv, prime);
      }
    }
    nodes.push_back(w0);
    dd.push_back(std::move(t));
  }
  dv_out = dv;
  // Expand the Newton form to the power basis in w.
  size_t n = nodes.size();
  std::vector<std::vector<uint64_t>> c(
      static_cast<size_t>(dv) + 1, std::vector<uint64_t>(n, 0));  // [v][w]
  // acc holds the polynomial in w (coefficient vectors over v powers).
  std::vector<std::vector<uint64_t>> acc(1, dd[n - 1]);
  for (int j = static_cast<int>(n) - 2; j >= 0; --j) {
    // acc = acc*(w - x_j) + dd[j]
    std::vector<std::vector<uint64_t>> next(acc.size() + 1,
                                            std::vector<uint64_t>(dv + 1, 0));
    for (size_t wi = 0; wi < acc.size(); ++wi) {
      for (int k = 0; k <= dv; ++k) {
        uint64_t val = k < static_cast<int>(acc[wi].size()) ? acc[wi][k] : 0;
        next[wi + 1][k] = (next[wi + 1][k] + val) % prime;
        uint64_t sub = mod_mul(val, nodes[j] % prime, prime);
        next[wi][k] = (next[wi][k] + prime - sub) % prime;
      }
    }
    for (int k = 0; k <= dv; ++k)
      next[0][k] =
          (next[0][k] + (k < static_cast<int>(dd[j].size()) ? dd[j][k] : 0)) %
          prime;
    acc = std::move(next);
  }
  for (size_t wi = 0; wi < acc.size(); ++wi)
    for (int k = 0; k <= dv; ++k)
      c[k][wi] = k < static_cast<int>(acc[wi].size()) ? acc[wi][k] : 0;
  return c;
}

// Content of p as univariate in v (gcd of the coefficient polynomials).
Poly content_in(const Poly& p, const AtomPtr& v) {
  std::vector<Poly> cs = poly_coeffs_in(p, v);
  Poly g;
  for (const auto& c : cs) {
    if (c.is_zero()) continue;
    g = gcd_impl(g, c);
    if (g.is_one()) break;
  }
  return g;
}

// Modular gcd driver for content-free primitive inputs over at most two
// atoms; w may be null for the univariate case. Empty on failure.
std::optional<Poly> modular_gcd(const Poly& a, const Poly& b, const AtomPtr& v,
                                const AtomPtr& w) {
  Poly lca = poly_coeffs_in(a, v).back();
  Poly lcb = poly_coeffs_in(b, v).back();
  // gcd over Z[w] of the leading coefficients: the primitive gcd times the
  // integer gcd of the contents (gcd_impl alone normalizes units away).
  Poly gamma = gcd_impl(lca, lcb);
  {
    Rational ca_q = abs(poly_unit_content(lca));
    Rational cb_q = abs(poly_unit_content(lcb));
    mpz_class gi;
    mpz_gcd(gi.get_mpz_t(), ca_q.get_num().get_mpz_t(),
            cb_q.get_num().get_mpz_t());
    gamma = gamma * Rational(gi);
  }
  int dw_count = 1;
  if (w) {
    int bw = gcd_degree_bound(a, b, w);  // upper bound on deg_w(gcd)
    if (bw < 0) bw = std::min(a.degree_in(w), b.degree_in(w));
    dw_count = bw + gamma.degree_in(w) + 1;
  }

  std::mt19937_64 rng(0xc2b2ae3d27d4eb4full);
  mpz_class modulus = 0;
  std::vector<std::vector<mpz_class>> accum;
  int acc_dv = -1;
  for (uint64_t prime : kLiftPrimes) {
    int dv = -1;
    std::optional<std::vector<std::vector<uint64_t>>> img;
    if (w) {
      img = modular_gcd_image(a, b, v, w, gamma, dw_count, prime, rng, dv);
    } else {
      std::map<const AtomData*, uint64_t> empty;
      auto ia = poly_image_mod(a, v, empty, prime);
      auto ib = poly_image_mod(b, v, empty, prime);
      if (ia && ib && static_cast<int>(ia->size()) - 1 == a.degree_in(v) &&
          static_cast<int>(ib->size()) - 1 == b.degree_in(v)) {
        std::vector<uint64_t> g = image_monic_gcd(*ia, *ib, prime);
        auto gm = rational_mod(gamma.constant_value(), prime);
        if (gm && *gm != 0) {
          dv = static_cast<int>(g.size()) - 1;
          std::vector<std::vector<uint64_t>> mat(g.size());
          for (size_t k = 0; k < g.size(); ++k)
            mat[k] = {mod_mul(g[k], *gm, prime)};
          img = std::move(mat);
        }
      }
    }
    if (!img || dv < 0) continue;
    // Inputs are content-free in v, so a degree-0 image proves coprimality.
    if (dv == 0) return Poly::constant(1);
    if (acc_dv < 0 || dv < acc_dv) {
      acc_dv = dv;
      modulus = static_cast<unsigned long>(prime);
      accum.assign(img->size(), {});
      for (size_t i = 0; i < img->size(); ++i) {
        accum[i].resize((*img)[i].size());
        for (size_t j = 0; j < (*img)[i].size(); ++j)
          accum[i][j] = mpz_class(static_cast<unsigned long>((*img)[i][j]));
      }
    } else if (dv == acc_dv) {
      for (size_t i = 0; i < accum.size(); ++i)
        for (size_t j = 0; j < accum[i].size(); ++j)
          accum[i][j] = crt_pair(accum[i][j], modulus, (*img)[i][j], prime);
      modulus *= static_cast<unsigned long>(prime);
    } else {
      continue;  // unlucky prime
    }
    // Symmetric lift and division check.
    Poly cand;
    mpz_class half = modulus / 2;
    for (size_t i = 0; i < accum.size(); ++i) {
      for (size_t j = 0; j < accum[i].size(); ++j) {
        mpz_class r = accum[i][j];
        if (r > half) r -= modulus;
        if (r == 0) continue;
        Monomial m;
        if (i > 0) m.factors.emplace_back(v, static_cast<int>(i));
        if (w && j > 0) m.factors.emplace_back(w, static_cast<int>(j));
        if (m.factors.size() == 2 && atom_lt(m.factors[1].first, m.factors[0].first))
          std::swap(m.factors[0], m.factors[1]);
        cand = cand + Poly::from_monomial(std::move(m), Rational(r));
      }
    }
    if (cand.is_zero() || cand.degree_in(v) != acc_dv) continue;
    if (w) {
      Poly cw = content_in(cand, v);
      if (!cw.is_constant()) cand = *poly_try_div(cand, cw);
    }
    cand = strip_unit(cand);
    if (poly_try_div(a, cand) && poly_try_div(b, cand)) return cand;
  }
  return std::nullopt;
}

// Pseudo-remainder of a by b as univariate in v.
Poly pseudo_rem(const Poly& a, const Poly& b, const AtomPtr& v) {
  std::vector<Poly> ra = poly_coeffs_in(a, v);
  std::vector<Poly> rb = poly_coeffs_in(b, v);
  int db = static_cast<int>(rb.size()) - 1;
  const Poly& lb = rb.back();
  std::vector<Poly> rem = ra;
  while (static_cast<int>(rem.size()) - 1 >= db) {
    int dr = static_cast<int>(rem.size()) - 1;
    Poly lead = rem.back();
    // rem := lb*rem - lead*v^(dr-db)*b
    for (auto& c : rem) c = c * lb;
    for (int k = 0; k <= db; ++k)
      rem[dr - db + k] = rem[dr - db + k] - lead * rb[k];
    while (!rem.empty() && rem.back().is_zero()) rem.pop_back();
    if (rem.empty()) break;
  }
  return poly_from_coeffs_in(rem, v);
}

Poly gcd_impl(Poly a, Poly b) {
  if (a.is_zero()) return strip_unit(b);
  if (b.is_zero()) return strip_unit(a);

  Monomial ma = poly_mono_content(a);
  Monomial mb = poly_mono_content(b);
  Monomial mg = mono_gcd(ma, mb);
  a = div_by_mono(a, ma);
  b = div_by_mono(b, mb);

  Poly result = Poly::from_monomial(mg, Rational(1));
  if (a.is_constant() || b.is_constant()) return strip_unit(result);

  // Main variable: the atom of lowest combined degree keeps the PRS short.
  std::set<AtomPtr> shared;
  for (const auto& atom : a.atoms())
    if (b.degree_in(atom) > 0) shared.insert(atom);
  if (shared.empty()) return strip_unit(result);
  AtomPtr v;
  int best = -1;
  for (const auto& atom : shared) {
    int d = a.degree_in(atom) + b.degree_in(atom);
    if (best < 0 || d < best) best = d, v = atom;
  }

  int bound = gcd_degree_bound(a, b, v);
  if (bound == 0) return strip_unit(result);

  a = strip_unit(a);
  b = strip_unit(b);
  // When one side could be the whole gcd, a single exact division settles
  // it; this covers the ubiquitous power-of-F^5 denominators.
  if (bound == b.degree_in(v) && poly_try_div(a, b))
    return strip_unit(result * b);
  if (bound == a.degree_in(v) && poly_try_div(b, a))
    return strip_unit(result * a);

  // Split off the content with respect to v.
  Poly ca = content_in(a, v);
  Poly cb = content_in(b, v);
  Poly cg = gcd_impl(ca, cb);
  Poly pa = strip_unit(*poly_try_div(a, ca));
  Poly pb = strip_unit(*poly_try_div(b, cb));

  // Modular interpolation covers one- and two-atom primitive parts; the
  // candidate is verified by exact division, so failures just fall through.
  std::set<AtomPtr> all_atoms = pa.atoms();
  for (const auto& atom : pb.atoms()) all_atoms.insert(atom);
  if (all_atoms.size() <= 2) {
    AtomPtr other;
    for (const auto& atom : all_atoms)
      if (atom != v) other = atom;
    if (auto g = modular_gcd(pa, pb, v, other))
      return strip_unit(result * cg * *g);
  }

  // Primitive PRS in v.
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  while (!pb.is_zero() && pb.degree_in(v) > 0) {
    Poly r = pseudo_rem(pa, pb, v);
    if (!r.is_zero()) {
      Poly cr = content_in(r, v);
      r = *poly_try_div(r, cr);
      r = strip_unit(r);
    }
    pa = std::move(pb);
    pb = std::move(r);
  }
  Poly g = pb.is_zero() ? pa : Poly::constant(1);
  return strip_unit(result * cg * g);
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) { return strip_unit(gcd_impl(a, b)); }

Rational poly_eval(const Poly& p,
                   const std::function<Rational(const AtomPtr&)>& bind) {
  Rational acc(0);
  for (const auto& [m, c] : p.terms) {
    Rational t = c;
    for (const auto& [a, e] : m.factors) {
      Rational v = bind(a);
      for (int k = 0; k < e; ++k) t *= v;
    }
    acc += t;
  }
  return acc;
}

double poly_eval_d(const Poly& p,
                   const std::function<double(const AtomPtr&)>& bind) {
  double acc = 0;
  for (const auto& [m, c] : p.terms) {
    double t = c.get_d();
    for (const auto& [a, e] : m.factors) {
      double v = bind(a);
      for (int k = 0; k < e; ++k) t *= v;
    }
    acc += t;
  }
  return acc;
}

std::vector<Poly> poly_coeffs_in(const Poly& p, const AtomPtr& v) {
  if (p.is_zero()) return {};
  std::vector<Poly> cs(static_cast<size_t>(p.degree_in(v)) + 1);
  for (const auto& [m, c] : p.terms) {
    int e = m.degree_of(v);
    Monomial rest;
    for (const auto& [a, k] : m.factors)
      if (a != v) rest.factors.emplace_back(a, k);
    cs[e] = cs[e] + Poly::from_monomial(std::move(rest), c);
  }
  return cs;
}

Poly poly_from_coeffs_in(const std::vector<Poly>& cs, const AtomPtr& v) {
  Poly r;
  for (size_t e = 0; e < cs.size(); ++e) {
    if (cs[e].is_zero()) continue;
    Poly ve = e == 0 ? Poly::constant(1) : Poly::from_atom(v, static_cast<int>(e));
    r = r + cs[e] * ve;
  }
  return r;
}

namespace {

std::string rational_to_string(const Rational& c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

std::string mono_to_string(const Monomial& m) {
  std::string s;
  for (const auto& [a, e] : m.factors) {
    if (!s.empty()) s += "*";
    s += atom_to_string(a);
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace

std::string poly_to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  for (const auto& [m, c] : p.terms) {
    Rational ac = abs(c);
    bool neg = c < 0;
    std::string piece;
    if (m.is_one()) {
      piece = rational_to_string(ac);
    } else if (ac == 1) {
      piece = mono_to_string(m);
    } else {
      piece = rational_to_string(ac) + "*" + mono_to_string(m);
    }
    if (s.empty()) {
      s = (neg ? "-" : "") + piece;
    } else {
      s += (neg ? " - " : " + ") + piece;
    }
  }
  return s;
}

std::string poly_key(const Poly& p) {
  std::string s;
  for (const auto& [m, c] : p.terms) {
    s += rational_to_string(c);
    for (const auto& [a, e] : m.factors)
      s += "," + a->key + "^" + std::to_string(e);
    s += ";";
  }
  return s;
}

}  // namespace odeinv
