#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nzeta {

using BigInt = mpz_class;

/// Thrown for domain errors in the exact-arithmetic layer (zero division,
/// malformed literals, violated preconditions).
class AlgebraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact rational number, always reduced with a positive denominator.
///
/// Thin value wrapper over mpq_class. Wrapping keeps GMP expression
/// templates out of user code, so `auto x = a * b;` is always a Rational.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : v_(v) {}   // NOLINT(google-explicit-constructor)
  Rational(const BigInt& v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw AlgebraError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  explicit Rational(const mpq_class& v) : v_(v) { v_.canonicalize(); }

  /// Parses "p", "-p", "p/q" (optionally surrounded by blanks).
  static Rational parse(std::string_view text) {
    auto s = std::string(text);
    auto first = s.find_first_not_of(" \t");
    auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) throw AlgebraError("empty rational literal");
    s = s.substr(first, last - first + 1);
    auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return Rational(parse_int(s));
      return Rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
    } catch (const std::invalid_argument&) {
      throw AlgebraError("malformed rational literal '" + std::string(text) + "'");
    }
  }

  BigInt num() const { return v_.get_num(); }
  BigInt den() const { return v_.get_den(); }
  bool is_integer() const { return v_.get_den() == 1; }
  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }

  const mpq_class& raw() const { return v_; }

  BigInt floor() const {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return q;
  }

  std::optional<long> to_long() const {
    if (!is_integer() || !v_.get_num().fits_slong_p()) return std::nullopt;
    return v_.get_num().get_si();
  }

  double to_double() const { return v_.get_d(); }

  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw AlgebraError("division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static BigInt parse_int(const std::string& s) {
    auto t = s;
    auto first = t.find_first_not_of(" \t");
    auto last = t.find_last_not_of(" \t");
    if (first == std::string::npos) throw std::invalid_argument("empty");
    t = t.substr(first, last - first + 1);
    if (!t.empty() && t[0] == '+') t = t.substr(1);
    std::size_t start = (!t.empty() && t[0] == '-') ? 1 : 0;
    if (start == t.size()) throw std::invalid_argument("sign only");
    for (std::size_t i = start; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') throw std::invalid_argument("digit");
    return BigInt(t, 10);
  }

  mpq_class v_{0};
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational pow(const Rational& base, unsigned long e) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.raw().get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.raw().get_den_mpz_t(), e);
  return Rational(n, d);
}

inline BigInt big_gcd(const BigInt& a, const BigInt& b) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
  BigInt l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline BigInt big_abs(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }

}  // namespace nzeta
