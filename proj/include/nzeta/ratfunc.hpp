#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "factor.hpp"
#include "matrix.hpp"
#include "poly.hpp"

namespace nzeta {

/// One factor q(z)^e of a RatFuncProduct.
struct RfpFactor {
  IntPoly q;
  long e = 0;
  friend bool operator==(const RfpFactor&, const RfpFactor&) = default;
};

/// A product of powers of Q-irreducible integer polynomials q with q(0) = 1.
///
/// The empty product is the constant 1. Instances are always canonical:
/// factors sorted by (degree, coefficients), distinct, exponents nonzero.
class RatFuncProduct {
 public:
  RatFuncProduct() = default;

  /// Validates every factor; equal factors are merged and factors whose merged
  /// exponent vanishes are dropped. A zero exponent on input is rejected.
  explicit RatFuncProduct(std::vector<RfpFactor> factors, bool check_irreducible = true) {
    for (const auto& f : factors) {
      if (f.e == 0) throw AlgebraError("zeta factor with exponent 0");
      if (f.q.degree() < 1) throw AlgebraError("zeta factor must be non-constant");
      if (f.q[0] != 1) throw AlgebraError("zeta factor must satisfy q(0) = 1: " + f.q.str('z'));
      if (content(f.q) != 1) throw AlgebraError("zeta factor must be primitive: " + f.q.str('z'));
      if (check_irreducible) {
        auto fz = factor_over_q(f.q);
        if (fz.factors.size() != 1 || fz.factors[0].second != 1)
          throw AlgebraError("zeta factor is reducible: " + f.q.str('z'));
      }
    }
    factors_ = merge(std::move(factors));
  }

  const std::vector<RfpFactor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  /// Builds num/den as a product; both must have constant term equal and nonzero.
  static RatFuncProduct from_ratfn(const QPoly& num, const QPoly& den) {
    if (num.is_zero() || den.is_zero()) throw AlgebraError("zeta of a zero rational function");
    if (!(num[0] == den[0]) || num[0].is_zero())
      throw AlgebraError("rational function must take the value 1 at z = 0");
    std::vector<RfpFactor> out;
    add_poly(num, 1, out);
    add_poly(den, -1, out);
    RatFuncProduct r;
    r.factors_ = merge(std::move(out));
    return r;
  }

  RatFuncProduct negate_z() const {
    std::vector<RfpFactor> out;
    for (const auto& f : factors_) out.push_back({f.q.negate_var(), f.e});
    RatFuncProduct r;
    r.factors_ = merge(std::move(out));
    return r;
  }

  RatFuncProduct reciprocal() const {
    RatFuncProduct r = *this;
    for (auto& f : r.factors_) f.e = -f.e;
    return r;
  }

  friend RatFuncProduct operator*(const RatFuncProduct& a, const RatFuncProduct& b) {
    std::vector<RfpFactor> out = a.factors_;
    out.insert(out.end(), b.factors_.begin(), b.factors_.end());
    RatFuncProduct r;
    r.factors_ = merge(std::move(out));
    return r;
  }
  friend RatFuncProduct operator/(const RatFuncProduct& a, const RatFuncProduct& b) {
    return a * b.reciprocal();
  }
  friend bool operator==(const RatFuncProduct& a, const RatFuncProduct& b) {
    return a.factors_ == b.factors_;
  }

  /// Numerator and denominator polynomials (positive and negated negative exponents).
  std::pair<IntPoly, IntPoly> as_fraction() const {
    IntPoly num = IntPoly::constant(1), den = IntPoly::constant(1);
    for (const auto& f : factors_) {
      IntPoly& side = f.e > 0 ? num : den;
      for (long i = 0; i < (f.e > 0 ? f.e : -f.e); ++i) side = side * f.q;
    }
    return {num, den};
  }

  /// c_1..c_n with z d/dz log(product) = sum c_k z^k.
  std::vector<Rational> log_derivative(std::size_t n) const {
    std::vector<Rational> c(n, Rational(0));
    for (const auto& f : factors_) {
      QPoly q = to_qpoly(f.q);
      QPoly zq = q.derivative() * QPoly::x();
      auto s = series_div(zq, q, n + 1);
      for (std::size_t k = 0; k < n; ++k) c[k] += Rational(f.e) * s[k + 1];
    }
    return c;
  }

  std::string str() const {
    if (factors_.empty()) return "1";
    std::vector<std::string> num, den;
    for (const auto& f : factors_) {
      std::string s = "(" + f.q.str('z') + ")";
      long m = f.e > 0 ? f.e : -f.e;
      if (m != 1) s += "^" + std::to_string(m);
      (f.e > 0 ? num : den).push_back(s);
    }
    auto join = [](const std::vector<std::string>& v) {
      std::string out;
      for (const auto& s : v) out += s;
      return out;
    };
    std::string top = num.empty() ? "1" : join(num);
    if (den.empty()) return top;
    return top + "/" + (den.size() == 1 ? den[0] : "(" + join(den) + ")");
  }

  friend std::ostream& operator<<(std::ostream& os, const RatFuncProduct& r) { return os << r.str(); }

 private:
  static std::vector<RfpFactor> merge(std::vector<RfpFactor> in) {
    std::sort(in.begin(), in.end(), [](const RfpFactor& a, const RfpFactor& b) { return canonical_less(a.q, b.q); });
    std::vector<RfpFactor> out;
    for (auto& f : in) {
      if (!out.empty() && out.back().q == f.q) {
        out.back().e += f.e;
        if (out.back().e == 0) out.pop_back();
      } else {
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  static void add_poly(const QPoly& p, long sign, std::vector<RfpFactor>& out) {
    if (p.degree() <= 0) return;
    IntPoly ip = integer_primitive(p).first;
    auto fz = factor_over_q(ip);
    for (auto& [q, m] : fz.factors) {
      if (q[0] == 0) throw AlgebraError("zeta factor vanishes at z = 0");
      IntPoly n = q[0] < 0 ? IntPoly(-q) : q;
      if (n[0] != 1) throw AlgebraError("factor " + n.str('z') + " cannot be normalized to q(0) = 1 over Z");
      out.push_back({n, sign * m});
    }
  }

  std::vector<RfpFactor> factors_;
};

inline RatFuncProduct rfp_negate_z(const RatFuncProduct& x) { return x.negate_z(); }
inline RatFuncProduct rfp_reciprocal(const RatFuncProduct& x) { return x.reciprocal(); }
inline bool rfp_equal(const RatFuncProduct& a, const RatFuncProduct& b) { return a == b; }

/// Recovers prod q_i^{e_i} from S = num/den = sum e_i z q_i'/q_i.
inline RatFuncProduct exponents_from_logderiv(const QPoly& num, const QPoly& den) {
  if (den.is_zero() || !(den[0] == 1)) throw AlgebraError("exponents_from_logderiv: den(0) must be 1");
  if (num.is_zero()) return {};
  IntPoly dint = integer_primitive(den).first;
  auto fz = factor_over_q(dint);
  std::vector<IntPoly> qs;
  for (auto& [q, m] : fz.factors) {
    if (q[0] == 0) throw AlgebraError("exponents_from_logderiv: den has a zero root");
    IntPoly n = q[0] < 0 ? IntPoly(-q) : q;
    if (n[0] != 1) throw AlgebraError("exponents_from_logderiv: factor not normalizable over Z: " + n.str('z'));
    qs.push_back(n);
  }
  // Multiply through by Q = prod q_i: S*Q = sum e_i z q_i' Q/q_i must be a polynomial.
  QPoly Q = QPoly::constant(1);
  for (const auto& q : qs) Q = Q * to_qpoly(q);
  auto [sq, rem] = divmod(num * Q, den);
  if (!rem.is_zero()) throw AlgebraError("exponents_from_logderiv: series has a pole of order > 1");
  std::vector<QPoly> cols;
  for (const auto& q : qs) {
    QPoly qq = to_qpoly(q);
    cols.push_back(QPoly::x() * qq.derivative() * exact_div(Q, qq));
  }
  std::size_t rows = static_cast<std::size_t>(std::max(sq.degree(), Q.degree()) + 1);
  QMatrix a(rows, cols.size());
  QVector b(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    b[i] = sq[i];
    for (std::size_t j = 0; j < cols.size(); ++j) a(i, j) = cols[j][i];
  }
  QVector e;
  if (!solve_linear(a, b, &e)) throw AlgebraError("exponents_from_logderiv: not a logarithmic derivative");
  std::vector<RfpFactor> out;
  for (std::size_t j = 0; j < qs.size(); ++j) {
    if (!e[j].is_integer()) throw AlgebraError("exponents_from_logderiv: non-integer exponent " + e[j].str());
    long ej = e[j].num().get_si();
    if (ej != 0) out.push_back({qs[j], ej});
  }
  RatFuncProduct r(std::move(out), false);
  // Verify: the product's log-derivative reproduces num/den.
  auto [pn, pd] = r.as_fraction();
  QPoly pnq = to_qpoly(pn), pdq = to_qpoly(pd);
  QPoly lhs = QPoly::x() * (pnq.derivative() * pdq - pnq * pdq.derivative());
  if (!(lhs * den == num * pnq * pdq)) throw AlgebraError("exponents_from_logderiv: verification failed");
  return r;
}

}  // namespace nzeta
