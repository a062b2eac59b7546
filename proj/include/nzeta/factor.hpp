#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "poly.hpp"

namespace nzeta {

/// content * prod(factor^multiplicity) == input; factors are irreducible over Q,
/// primitive, with positive leading coefficient, sorted canonically.
struct Factorization {
  BigInt content = 1;
  std::vector<std::pair<IntPoly, int>> factors;
};

namespace detail {

// Arithmetic in F_p[x], p an odd prime below 2^31. Coefficients ascending.
class ModPoly {
 public:
  using Vec = std::vector<std::int64_t>;

  explicit ModPoly(std::int64_t p) : p_(p) {}

  std::int64_t p() const { return p_; }

  std::int64_t red(std::int64_t v) const {
    v %= p_;
    return v < 0 ? v + p_ : v;
  }
  std::int64_t mulm(std::int64_t a, std::int64_t b) const { return (a * b) % p_; }
  std::int64_t inv(std::int64_t a) const { return powm(a, p_ - 2); }
  std::int64_t powm(std::int64_t a, std::int64_t e) const {
    std::int64_t r = 1;
    a = red(a);
    while (e) {
      if (e & 1) r = mulm(r, a);
      a = mulm(a, a);
      e >>= 1;
    }
    return r;
  }

  static void trim(Vec& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  static int deg(const Vec& a) { return static_cast<int>(a.size()) - 1; }

  Vec from_int(const IntPoly& f) const {
    Vec v;
    v.reserve(f.size());
    BigInt pp = p_;
    for (const auto& c : f.coeffs()) {
      BigInt r;
      mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), pp.get_mpz_t());
      v.push_back(r.get_si());
    }
    trim(v);
    return v;
  }

  Vec add(const Vec& a, const Vec& b) const {
    Vec c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = red(c[i] + b[i]);
    trim(c);
    return c;
  }
  Vec sub(const Vec& a, const Vec& b) const {
    Vec c(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = red(c[i] - b[i]);
    trim(c);
    return c;
  }
  Vec mul(const Vec& a, const Vec& b) const {
    if (a.empty() || b.empty()) return {};
    Vec c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % p_;
    trim(c);
    return c;
  }
  Vec scale(const Vec& a, std::int64_t s) const {
    Vec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = mulm(a[i], red(s));
    trim(c);
    return c;
  }
  std::pair<Vec, Vec> divmod(const Vec& a, const Vec& b) const {
    Vec r = a;
    if (deg(a) < deg(b)) return {{}, r};
    Vec q(static_cast<std::size_t>(deg(a) - deg(b) + 1), 0);
    std::int64_t il = inv(b.back());
    auto db = static_cast<std::size_t>(deg(b));
    for (std::size_t i = r.size(); i-- > db;) {
      if (r[i] == 0) continue;
      std::int64_t f = mulm(r[i], il);
      q[i - db] = f;
      for (std::size_t j = 0; j <= db; ++j) r[i - db + j] = red(r[i - db + j] - f * b[j]);
    }
    r.resize(db);
    trim(r);
    trim(q);
    return {q, r};
  }
  Vec mod(const Vec& a, const Vec& b) const { return divmod(a, b).second; }
  Vec monic(const Vec& a) const { return a.empty() ? a : scale(a, inv(a.back())); }
  Vec gcd(Vec a, Vec b) const {
    while (!b.empty()) {
      Vec r = mod(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }
  /// s, t with s a + t b = gcd(a, b) (monic).
  void ext_gcd(const Vec& a, const Vec& b, Vec& s, Vec& t, Vec& g) const {
    Vec r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
    while (!r1.empty()) {
      auto [q, r] = divmod(r0, r1);
      Vec s2 = sub(s0, mul(q, s1));
      Vec t2 = sub(t0, mul(q, t1));
      r0 = std::move(r1);
      r1 = std::move(r);
      s0 = std::move(s1);
      s1 = std::move(s2);
      t0 = std::move(t1);
      t1 = std::move(t2);
    }
    std::int64_t il = inv(r0.back());
    g = scale(r0, il);
    s = scale(s0, il);
    t = scale(t0, il);
  }
  Vec derivative(const Vec& a) const {
    if (a.size() <= 1) return {};
    Vec d(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = mulm(a[i], static_cast<std::int64_t>(i) % p_);
    trim(d);
    return d;
  }
  Vec powmod(Vec base, std::uint64_t e, const Vec& m) const {
    Vec r{1};
    base = mod(base, m);
    while (e) {
      if (e & 1) r = mod(mul(r, base), m);
      base = mod(mul(base, base), m);
      e >>= 1;
    }
    return r;
  }
  /// base^(p^k) mod m by repeated p-th powering.
  Vec frobenius(Vec base, int k, const Vec& m) const {
    for (int i = 0; i < k; ++i) base = powmod(base, static_cast<std::uint64_t>(p_), m);
    return base;
  }

  /// Monic irreducible factors of a monic square-free f (Cantor-Zassenhaus).
  std::vector<Vec> factor_squarefree_monic(const Vec& f, std::mt19937_64& rng) const {
    std::vector<Vec> out;
    // Distinct-degree factorization.
    Vec rest = f;
    Vec h{0, 1};
    const Vec x{0, 1};
    for (int d = 1; deg(rest) >= 2 * d; ++d) {
      h = powmod(h, static_cast<std::uint64_t>(p_), rest);
      Vec g = gcd(sub(h, x), rest);
      if (deg(g) > 0) {
        equal_degree(g, d, rng, out);
        rest = divmod(rest, g).first;
        h = mod(h, rest);
      }
    }
    if (deg(rest) > 0) out.push_back(monic(rest));
    return out;
  }

 private:
  void equal_degree(const Vec& g, int d, std::mt19937_64& rng, std::vector<Vec>& out) const {
    if (deg(g) == d) {
      out.push_back(monic(g));
      return;
    }
    std::uniform_int_distribution<std::int64_t> dist(0, p_ - 1);
    // (p^d - 1) / 2 as a big exponent: compute by repeated squaring via frobenius chain.
    while (true) {
      Vec a(static_cast<std::size_t>(deg(g)), 0);
      for (auto& c : a) c = dist(rng);
      trim(a);
      if (deg(a) < 1) continue;
      Vec w = half_power(a, d, g);
      Vec cand = gcd(sub(w, Vec{1}), g);
      if (deg(cand) > 0 && deg(cand) < deg(g)) {
        equal_degree(cand, d, rng, out);
        equal_degree(divmod(g, cand).first, d, rng, out);
        return;
      }
    }
  }

  // a^((p^d - 1)/2) mod g. Uses (p^d - 1)/2 = ((p-1)/2) * (1 + p + ... + p^(d-1)).
  Vec half_power(const Vec& a, int d, const Vec& g) const {
    Vec acc{1};
    Vec cur = mod(a, g);
    for (int i = 0; i < d; ++i) {
      acc = mod(mul(acc, cur), g);
      cur = powmod(cur, static_cast<std::uint64_t>(p_), g);
    }
    return powmod(acc, static_cast<std::uint64_t>((p_ - 1) / 2), g);
  }

  std::int64_t p_;
};

inline bool is_prime_small(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Polynomials over Z / p^a, symmetric residues not required during lifting.
inline IntPoly mod_big(const IntPoly& f, const BigInt& m) {
  std::vector<BigInt> c;
  c.reserve(f.size());
  for (const auto& v : f.coeffs()) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    c.push_back(r);
  }
  return IntPoly(std::move(c));
}

inline IntPoly symmetric_mod(const IntPoly& f, const BigInt& m) {
  BigInt half = m / 2;
  std::vector<BigInt> c;
  c.reserve(f.size());
  for (const auto& v : f.coeffs()) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
    if (r > half) r -= m;
    c.push_back(r);
  }
  return IntPoly(std::move(c));
}

inline IntPoly to_int(const ModPoly::Vec& v) {
  std::vector<BigInt> c;
  c.reserve(v.size());
  for (auto x : v) c.emplace_back(static_cast<long>(x));
  return IntPoly(std::move(c));
}

inline ModPoly::Vec to_mod(const ModPoly& F, const IntPoly& f) { return F.from_int(f); }

// Lifts monic u, w with F == u*w (mod p) to mod p^a, F monic mod p^a.
inline std::pair<IntPoly, IntPoly> hensel_pair(const IntPoly& F, IntPoly u, IntPoly w, const ModPoly& Fp,
                                              int a) {
  ModPoly::Vec s, t, g;
  Fp.ext_gcd(to_mod(Fp, u), to_mod(Fp, w), s, t, g);
  if (ModPoly::deg(g) != 0) throw AlgebraError("hensel: factors not coprime mod p");
  BigInt p = Fp.p();
  BigInt pk = p;
  ModPoly::Vec u0 = to_mod(Fp, u), w0 = to_mod(Fp, w);
  for (int k = 1; k < a; ++k) {
    IntPoly e = F - u * w;
    // e is divisible by p^k.
    std::vector<BigInt> ec;
    for (const auto& c : e.coeffs()) ec.emplace_back(BigInt(c / pk));
    ModPoly::Vec em = Fp.from_int(IntPoly(std::move(ec)));
    ModPoly::Vec du = Fp.mod(Fp.mul(em, t), u0);
    ModPoly::Vec dw = Fp.divmod(Fp.sub(em, Fp.mul(du, w0)), u0).first;
    u = u + to_int(du) * pk;
    w = w + to_int(dw) * pk;
    pk *= p;
    u = mod_big(u, pk);
    w = mod_big(w, pk);
  }
  return {u, w};
}

inline std::vector<IntPoly> hensel_lift(const IntPoly& F, const std::vector<ModPoly::Vec>& facs,
                                        const ModPoly& Fp, int a, const BigInt& pa) {
  if (facs.size() == 1) return {mod_big(F, pa)};
  ModPoly::Vec rest{1};
  for (std::size_t i = 1; i < facs.size(); ++i) rest = Fp.mul(rest, facs[i]);
  auto [u, w] = hensel_pair(F, to_int(facs[0]), to_int(rest), Fp, a);
  std::vector<ModPoly::Vec> tail(facs.begin() + 1, facs.end());
  auto lifted = hensel_lift(w, tail, Fp, a, pa);
  lifted.insert(lifted.begin(), u);
  return lifted;
}

inline BigInt max_abs_coeff(const IntPoly& f) {
  BigInt m = 0;
  for (const auto& c : f.coeffs()) m = std::max(m, big_abs(c));
  return m;
}

// Irreducible factors of a primitive square-free f with positive leading coefficient.
inline std::vector<IntPoly> zassenhaus(const IntPoly& f) {
  if (f.degree() <= 1) return {f};
  // Choose p: odd prime, p does not divide lc, f square-free mod p.
  std::int64_t p = 3;
  for (;; p += 2) {
    if (!is_prime_small(p)) continue;
    ModPoly Fp(p);
    auto fm = Fp.from_int(f);
    if (ModPoly::deg(fm) != f.degree()) continue;
    if (ModPoly::deg(Fp.gcd(fm, Fp.derivative(fm))) == 0) break;
    if (p > 100000) throw AlgebraError("zassenhaus: no suitable prime");
  }
  ModPoly Fp(p);
  std::mt19937_64 rng(0x5eedULL + static_cast<std::uint64_t>(f.degree()));
  auto fm = Fp.monic(Fp.from_int(f));
  auto modfacs = Fp.factor_squarefree_monic(fm, rng);
  if (modfacs.size() == 1) return {f};

  const int n = f.degree();
  BigInt lc = f.lead();
  BigInt bound = BigInt(2) * big_abs(lc) * (BigInt(1) << n) * BigInt(n + 1) * max_abs_coeff(f) + 1;
  int a = 1;
  BigInt pa = p;
  while (pa <= bound) {
    pa *= p;
    ++a;
  }
  // Monic image of f mod p^a.
  BigInt lc_inv;
  mpz_invert(lc_inv.get_mpz_t(), lc.get_mpz_t(), pa.get_mpz_t());
  IntPoly F = mod_big(f * lc_inv, pa);
  auto lifted = hensel_lift(F, modfacs, Fp, a, pa);

  std::vector<IntPoly> result;
  IntPoly g = f;
  std::vector<IntPoly> remaining = lifted;
  std::size_t s = 1;
  while (2 * s <= remaining.size()) {
    bool found = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    while (true) {
      BigInt glc = g.lead();
      IntPoly prod = IntPoly::constant(glc);
      for (auto i : idx) prod = mod_big(prod * remaining[i], pa);
      IntPoly cand = primitive_part(symmetric_mod(prod, pa));
      IntPoly q;
      if (cand.degree() > 0 && int_divides(g, cand, &q)) {
        result.push_back(cand);
        g = q;
        std::vector<IntPoly> keep;
        for (std::size_t i = 0, j = 0; i < remaining.size(); ++i) {
          if (j < s && idx[j] == i) {
            ++j;
            continue;
          }
          keep.push_back(remaining[i]);
        }
        remaining = std::move(keep);
        found = true;
        break;
      }
      // next combination
      std::size_t k = s;
      while (k > 0 && idx[k - 1] == remaining.size() - s + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < s; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!found) ++s;
  }
  if (g.degree() > 0) result.push_back(primitive_part(g));
  return result;
}

}  // namespace detail

/// Complete factorization over Q of a nonzero integer polynomial.
inline Factorization factor_over_q(const IntPoly& f) {
  if (f.is_zero()) throw AlgebraError("factor_over_q: zero polynomial");
  Factorization out;
  out.content = content(f);
  if (f.lead() < 0) out.content = -out.content;
  if (f.degree() == 0) {
    out.content = f.lead();
    return out;
  }
  auto parts = squarefree_decomposition(to_qpoly(f));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].degree() <= 0) continue;
    IntPoly sq = integer_primitive(parts[i]).first;
    // Peel the factor x explicitly; keeps the modular step away from zero roots.
    if (sq[0] == 0) {
      out.factors.emplace_back(IntPoly::x(), static_cast<int>(i + 1));
      IntPoly q;
      int_divides(sq, IntPoly::x(), &q);
      sq = q;
    }
    if (sq.degree() <= 0) continue;
    for (auto& g : detail::zassenhaus(sq)) out.factors.emplace_back(primitive_part(g), static_cast<int>(i + 1));
  }
  std::sort(out.factors.begin(), out.factors.end(),
            [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  return out;
}

/// Multiplies a factorization back out.
inline IntPoly expand(const Factorization& fz) {
  IntPoly r = IntPoly::constant(fz.content);
  for (const auto& [q, m] : fz.factors)
    for (int i = 0; i < m; ++i) r = r * q;
  return r;
}

}  // namespace nzeta
