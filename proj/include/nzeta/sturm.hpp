#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "poly.hpp"

namespace nzeta {

/// Interval endpoint; std::nullopt stands for -inf (as lower) or +inf (as upper).
using Bound = std::optional<Rational>;

namespace detail {

inline std::vector<QPoly> sturm_chain(const QPoly& p) {
  std::vector<QPoly> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    QPoly r = chain[chain.size() - 2] % chain.back();
    chain.push_back(-r);
  }
  chain.pop_back();
  return chain;
}

inline int sign_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

inline int variations_at(const std::vector<QPoly>& chain, const Rational& x) {
  std::vector<int> s;
  s.reserve(chain.size());
  for (const auto& q : chain) s.push_back(q.eval(x).sign());
  return sign_changes(s);
}

inline int variations_at_infinity(const std::vector<QPoly>& chain, bool positive) {
  std::vector<int> s;
  s.reserve(chain.size());
  for (const auto& q : chain) {
    int sg = q.lead().sign();
    if (!positive && q.degree() % 2 == 1) sg = -sg;
    s.push_back(sg);
  }
  return sign_changes(s);
}

}  // namespace detail

/// Number of distinct real roots of `poly` in the open interval (lo, hi).
/// Constants (including zero) report 0.
inline int sturm_count(const QPoly& poly, const Bound& lo = std::nullopt,
                       const Bound& hi = std::nullopt) {
  if (poly.degree() <= 0) return 0;
  if (lo && hi && !(*lo < *hi)) return 0;
  QPoly sf = squarefree_part(poly);
  auto chain = detail::sturm_chain(sf);
  int v_lo = lo ? detail::variations_at(chain, *lo) : detail::variations_at_infinity(chain, false);
  int v_hi = hi ? detail::variations_at(chain, *hi) : detail::variations_at_infinity(chain, true);
  // V(a) - V(b) counts roots in (a, b]; drop b itself when it is a root.
  int hi_is_root = (hi && sf.eval(*hi).is_zero()) ? 1 : 0;
  return v_lo - v_hi - hi_is_root;
}

/// Isolating interval for one real root. When `exact` is set the root is lo == hi;
/// otherwise the open interval (lo, hi) holds exactly one root and neither end is a root.
struct RootInterval {
  Rational lo;
  Rational hi;
  bool exact = false;
};

/// Isolates the distinct real roots of a nonzero polynomial, in increasing order.
inline std::vector<RootInterval> isolate_real_roots(const QPoly& poly) {
  std::vector<RootInterval> out;
  if (poly.degree() <= 0) return out;
  QPoly sf = squarefree_part(poly);
  Rational bound = 0;
  for (const auto& c : sf.coeffs()) bound = std::max(bound, abs(c / sf.lead()));
  bound += 1;
  auto rec = [&](auto&& self, const Rational& lo, const Rational& hi) -> void {
    int count = sturm_count(sf, lo, hi);
    if (count == 0) return;
    if (count == 1) {
      out.push_back({lo, hi, false});
      return;
    }
    Rational mid = (lo + hi) / Rational(2);
    self(self, lo, mid);
    if (sf.eval(mid).is_zero()) out.push_back({mid, mid, true});
    self(self, mid, hi);
  };
  rec(rec, -bound, bound);
  return out;
}

/// Shrinks an isolating interval of a square-free polynomial to width <= eps.
inline RootInterval refine_root(const QPoly& sf, RootInterval iv, const Rational& eps) {
  while (!iv.exact && iv.hi - iv.lo > eps) {
    Rational mid = (iv.lo + iv.hi) / Rational(2);
    if (sf.eval(mid).is_zero()) return {mid, mid, true};
    if (sturm_count(sf, iv.lo, mid) == 1)
      iv.hi = mid;
    else
      iv.lo = mid;
  }
  return iv;
}

}  // namespace nzeta
