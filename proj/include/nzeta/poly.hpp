#pragma once

#include <algorithm>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace nzeta {

/// Dense univariate polynomial, coefficients in ascending degree.
/// The zero polynomial has no coefficients; otherwise the leading
/// coefficient is nonzero.
template <class T>
class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<T> c) : c_(c) { trim(); }
  explicit Poly(std::vector<T> c) : c_(std::move(c)) { trim(); }

  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
  static Poly monomial(const T& v, std::size_t deg) {
    std::vector<T> c(deg + 1, T(0));
    c[deg] = v;
    return Poly(std::move(c));
  }
  /// The polynomial x (or z).
  static Poly x() { return monomial(T(1), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<T>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

  T operator[](std::size_t i) const { return i < c_.size() ? c_[i] : T(0); }
  T lead() const { return c_.empty() ? T(0) : c_.back(); }

  template <class U>
  U eval(const U& x) const {
    U acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + U(*it);
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
    return Poly(std::move(d));
  }

  /// p(-x).
  Poly negate_var() const {
    auto c = c_;
    for (std::size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
    return Poly(std::move(c));
  }

  /// x^n p(1/x) with n = degree.
  Poly reversed() const {
    auto c = c_;
    std::reverse(c.begin(), c.end());
    return Poly(std::move(c));
  }

  /// Truncation to terms of degree < n.
  Poly truncated(std::size_t n) const {
    if (c_.size() <= n) return *this;
    return Poly(std::vector<T>(c_.begin(), c_.begin() + static_cast<long>(n)));
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  Poly& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) {
    auto c = a.c_;
    for (auto& v : c) v = -v;
    return Poly(std::move(c));
  }
  friend Poly operator*(Poly a, const T& s) { return a *= s; }
  friend Poly operator*(const T& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> c(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(c));
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  /// Orders by degree, then by the coefficient sequence from the constant term up.
  friend bool canonical_less(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] < b.c_[i]) return true;
      if (b.c_[i] < a.c_[i]) return false;
    }
    return false;
  }

  std::string str(char var = 'x') const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      T v = c_[i];
      bool neg = v < 0;
      if (neg) v = -v;
      if (first) {
        if (neg) os << "-";
      } else {
        os << (neg ? " - " : " + ");
      }
      first = false;
      if (i == 0 || !(v == 1)) os << v;
      if (i >= 1) os << var;
      if (i >= 2) os << "^" << i;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<T> c_;
};

using QPoly = Poly<Rational>;
using IntPoly = Poly<BigInt>;

inline QPoly to_qpoly(const IntPoly& p) {
  std::vector<Rational> c;
  c.reserve(p.size());
  for (const auto& v : p.coeffs()) c.emplace_back(v);
  return QPoly(std::move(c));
}

inline BigInt content(const IntPoly& p) {
  BigInt g = 0;
  for (const auto& v : p.coeffs()) g = big_gcd(g, v);
  return g;
}

/// Primitive part with positive leading coefficient.
inline IntPoly primitive_part(const IntPoly& p) {
  if (p.is_zero()) return p;
  BigInt g = content(p);
  if (p.lead() < 0) g = -g;
  std::vector<BigInt> c;
  c.reserve(p.size());
  for (const auto& v : p.coeffs()) c.emplace_back(BigInt(v / g));
  return IntPoly(std::move(c));
}

/// Writes p = scale * q with q a primitive integer polynomial whose leading
/// coefficient is positive.
inline std::pair<IntPoly, Rational> integer_primitive(const QPoly& p) {
  if (p.is_zero()) return {IntPoly{}, Rational(0)};
  BigInt l = 1;
  for (const auto& v : p.coeffs()) l = big_lcm(l, v.den());
  std::vector<BigInt> c;
  c.reserve(p.size());
  for (const auto& v : p.coeffs()) c.emplace_back(BigInt(v.num() * (l / v.den())));
  IntPoly ip(std::move(c));
  IntPoly prim = primitive_part(ip);
  Rational scale = p.lead() / Rational(prim.lead());
  return {prim, scale};
}

/// Euclidean division over Q. Throws on zero divisor.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw AlgebraError("polynomial division by zero");
  if (a.degree() < b.degree()) return {QPoly{}, a};
  std::vector<Rational> r = a.coeffs();
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), Rational(0));
  Rational inv_lead = Rational(1) / b.lead();
  auto db = static_cast<std::size_t>(b.degree());
  for (std::size_t i = r.size(); i-- > db;) {
    if (r[i].is_zero()) continue;
    Rational f = r[i] * inv_lead;
    q[i - db] = f;
    for (std::size_t j = 0; j <= db; ++j) r[i - db + j] -= f * b[j];
  }
  r.resize(db);
  return {QPoly(std::move(q)), QPoly(std::move(r))};
}

inline QPoly operator%(const QPoly& a, const QPoly& b) { return divmod(a, b).second; }

inline QPoly monic(const QPoly& p) {
  if (p.is_zero()) return p;
  return p * (Rational(1) / p.lead());
}

/// Monic gcd over Q (zero when both inputs are zero).
inline QPoly gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

/// Exact division; throws if b does not divide a.
inline QPoly exact_div(const QPoly& a, const QPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw AlgebraError("inexact polynomial division");
  return q;
}

/// Exact division in Z[x]; returns false when the quotient is not integral
/// or the remainder is nonzero.
inline bool int_divides(const IntPoly& a, const IntPoly& b, IntPoly* quotient) {
  if (b.is_zero()) return false;
  if (a.is_zero()) {
    if (quotient) *quotient = IntPoly{};
    return true;
  }
  if (a.degree() < b.degree()) return false;
  std::vector<BigInt> r = a.coeffs();
  std::vector<BigInt> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), BigInt(0));
  auto db = static_cast<std::size_t>(b.degree());
  const BigInt& lb = b.coeffs().back();
  for (std::size_t i = r.size(); i-- > db;) {
    if (r[i] == 0) continue;
    if (!mpz_divisible_p(r[i].get_mpz_t(), lb.get_mpz_t())) return false;
    BigInt f = r[i] / lb;
    q[i - db] = f;
    for (std::size_t j = 0; j <= db; ++j) r[i - db + j] -= f * b.coeffs()[j];
  }
  for (std::size_t i = 0; i < db; ++i)
    if (r[i] != 0) return false;
  if (quotient) *quotient = IntPoly(std::move(q));
  return true;
}

/// Square-free decomposition (Yun): returns monic a_1, a_2, ... with
/// p = lead * a_1 * a_2^2 * a_3^3 ...; entries may be constant 1.
inline std::vector<QPoly> squarefree_decomposition(const QPoly& p) {
  if (p.is_zero()) throw AlgebraError("square-free decomposition of zero");
  std::vector<QPoly> out;
  if (p.degree() == 0) return out;
  QPoly f = monic(p);
  QPoly fp = f.derivative();
  QPoly a = gcd(f, fp);
  QPoly b = exact_div(f, a);
  QPoly c = exact_div(fp, a);
  QPoly d = c - b.derivative();
  while (b.degree() > 0) {
    QPoly g = gcd(b, d);
    out.push_back(g);
    b = exact_div(b, g);
    c = exact_div(d, g);
    d = c - b.derivative();
  }
  return out;
}

inline QPoly squarefree_part(const QPoly& p) {
  return exact_div(monic(p), gcd(p, p.derivative()));
}

/// Power series quotient num/den up to (excluding) degree n; den(0) != 0.
inline std::vector<Rational> series_div(const QPoly& num, const QPoly& den, std::size_t n) {
  if (den[0].is_zero()) throw AlgebraError("series division needs den(0) != 0");
  std::vector<Rational> out(n, Rational(0));
  Rational inv0 = Rational(1) / den[0];
  for (std::size_t k = 0; k < n; ++k) {
    Rational acc = num[k];
    std::size_t lim = std::min(k, static_cast<std::size_t>(std::max(den.degree(), 0)));
    for (std::size_t j = 1; j <= lim; ++j) acc -= den[j] * out[k - j];
    out[k] = acc * inv0;
  }
  return out;
}

}  // namespace nzeta
