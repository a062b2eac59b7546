#pragma once

#include <memory>
#include <utility>

#include "factor.hpp"
#include "poly.hpp"
#include "sturm.hpp"

namespace nzeta {

/// Q(theta) for a real algebraic theta, given by its minimal polynomial and an
/// isolating interval (lo, hi) with exactly one root.
struct NumberField {
  QPoly minpoly;  // monic
  Rational lo;
  Rational hi;

  static std::shared_ptr<const NumberField> make(const IntPoly& minpoly, const Rational& lo, const Rational& hi) {
    if (minpoly.degree() < 1 || minpoly.degree() > 3) throw AlgebraError("number field degree must be 1..3");
    auto fz = factor_over_q(minpoly);
    if (fz.factors.size() != 1 || fz.factors[0].second != 1)
      throw AlgebraError("minimal polynomial is reducible: " + minpoly.str());
    QPoly m = monic(to_qpoly(minpoly));
    if (!(lo < hi) || sturm_count(m, lo, hi) != 1 || m.eval(lo).is_zero() || m.eval(hi).is_zero())
      throw AlgebraError("interval does not isolate a single root of " + minpoly.str());
    return std::make_shared<const NumberField>(NumberField{m, lo, hi});
  }
};

/// Element of Q(theta) stored as a polynomial in theta of degree below the
/// field degree. Elements built from plain rationals carry no field and adopt
/// the field of whatever they are combined with.
class NumberFieldElem {
 public:
  NumberFieldElem() = default;
  NumberFieldElem(long v) : v_(QPoly::constant(Rational(v))) {}  // NOLINT(google-explicit-constructor)
  NumberFieldElem(int v) : v_(QPoly::constant(Rational(v))) {}   // NOLINT(google-explicit-constructor)
  NumberFieldElem(const Rational& v) : v_(QPoly::constant(v)) {}  // NOLINT(google-explicit-constructor)
  NumberFieldElem(std::shared_ptr<const NumberField> k, QPoly rep) : k_(std::move(k)), v_(std::move(rep)) { reduce(); }

  static NumberFieldElem theta(std::shared_ptr<const NumberField> k) { return {std::move(k), QPoly::x()}; }

  const QPoly& representation() const { return v_; }
  const std::shared_ptr<const NumberField>& field() const { return k_; }

  bool is_zero() const { return v_.is_zero(); }
  /// The rational value when the element lies in Q.
  std::optional<Rational> as_rational() const {
    if (v_.degree() <= 0) return v_[0];
    return std::nullopt;
  }

  NumberFieldElem& operator+=(const NumberFieldElem& o) {
    adopt(o);
    v_ += o.v_;
    return *this;
  }
  NumberFieldElem& operator-=(const NumberFieldElem& o) {
    adopt(o);
    v_ -= o.v_;
    return *this;
  }
  NumberFieldElem& operator*=(const NumberFieldElem& o) {
    adopt(o);
    v_ = v_ * o.v_;
    reduce();
    return *this;
  }
  NumberFieldElem& operator/=(const NumberFieldElem& o) {
    adopt(o);
    *this *= o.inverse(k_);
    return *this;
  }

  friend NumberFieldElem operator+(NumberFieldElem a, const NumberFieldElem& b) { return a += b; }
  friend NumberFieldElem operator-(NumberFieldElem a, const NumberFieldElem& b) { return a -= b; }
  friend NumberFieldElem operator*(NumberFieldElem a, const NumberFieldElem& b) { return a *= b; }
  friend NumberFieldElem operator/(NumberFieldElem a, const NumberFieldElem& b) { return a /= b; }
  friend NumberFieldElem operator-(const NumberFieldElem& a) { return {a.k_, -a.v_}; }
  friend bool operator==(const NumberFieldElem& a, const NumberFieldElem& b) { return (a - b).is_zero(); }

 private:
  void adopt(const NumberFieldElem& o) {
    if (!k_ && o.k_) {
      k_ = o.k_;
      reduce();
    }
    if (k_ && o.k_ && k_ != o.k_ && !(k_->minpoly == o.k_->minpoly && k_->lo == o.k_->lo && k_->hi == o.k_->hi))
      throw AlgebraError("mixing elements of different number fields");
  }

  void reduce() {
    if (k_ && v_.degree() >= k_->minpoly.degree()) v_ = v_ % k_->minpoly;
  }

  NumberFieldElem inverse(const std::shared_ptr<const NumberField>& k) const {
    if (is_zero()) throw AlgebraError("division by zero in number field");
    if (!k || v_.degree() == 0) return {k, QPoly::constant(Rational(1) / v_[0])};
    // Extended Euclid: s*v + t*m = 1.
    QPoly r0 = k->minpoly, r1 = v_, s0, s1 = QPoly::constant(1);
    while (!r1.is_zero()) {
      auto [q, r] = divmod(r0, r1);
      QPoly s2 = s0 - q * s1;
      r0 = std::move(r1);
      r1 = std::move(r);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    if (r0.degree() != 0) throw AlgebraError("element not invertible (minimal polynomial reducible?)");
    return {k, s0 * (Rational(1) / r0[0])};
  }

  std::shared_ptr<const NumberField> k_;
  QPoly v_;
};

/// Sign of the real number the element denotes.
inline int nf_sign(const NumberFieldElem& x) {
  if (x.is_zero()) return 0;
  if (auto r = x.as_rational()) return r->sign();
  const auto& k = *x.field();
  const QPoly& rep = x.representation();
  RootInterval iv{k.lo, k.hi, false};
  // rep and the minimal polynomial are coprime, so rep has no root at theta and
  // shrinking the interval eventually leaves rep root-free on it.
  while (true) {
    if (!rep.eval(iv.lo).is_zero() && !rep.eval(iv.hi).is_zero() && sturm_count(rep, iv.lo, iv.hi) == 0)
      return rep.eval(iv.lo).sign();
    Rational mid = (iv.lo + iv.hi) / Rational(2);
    if (k.minpoly.eval(mid).is_zero()) return rep.eval(mid).sign();
    if (sturm_count(k.minpoly, iv.lo, mid) == 1)
      iv.hi = mid;
    else
      iv.lo = mid;
  }
}

}  // namespace nzeta
