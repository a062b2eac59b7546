#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fixedpoint.hpp"
#include "ratfunc.hpp"
#include "recurrence.hpp"

namespace nzeta {

/// Recurrence order bound 2^(n+1) and the number of terms used (2 bound + 12).
inline int zeta_bound(std::size_t n) { return 1 << (n + 1); }
inline std::size_t zeta_terms(std::size_t n) { return 2 * static_cast<std::size_t>(zeta_bound(n)) + 12; }

/// The product whose logarithmic derivative z d/dz log is sum_k c_k z^k.
inline RatFuncProduct zeta_from_sequence(const std::vector<BigInt>& c, int bound) {
  std::vector<Rational> seq(c.begin(), c.end());
  auto [num, den] = berlekamp_massey_q(seq, bound);
  return exponents_from_logderiv(num, den);
}

/// prod_j det(I - z Lambda^j D)^((-1)^(j+1)): the Lefschetz zeta of a map on a
/// nilmanifold or torus.
inline RatFuncProduct lefschetz_zeta_closed_form(const QMatrix& D) {
  const std::size_t n = D.rows();
  QPoly num = QPoly::constant(1), den = QPoly::constant(1);
  for (std::size_t j = 0; j <= n; ++j) {
    QPoly f = det_one_minus_z(exterior_power(D, j));
    (j % 2 == 1 ? num : den) = (j % 2 == 1 ? num : den) * f;
  }
  return RatFuncProduct::from_ratfn(num, den);
}

/// L_f(z) averaged over the given holonomy elements (all when empty).
inline RatFuncProduct lefschetz_zeta(const MapCandidate& c, const std::vector<std::size_t>& subset = {}) {
  const std::size_t n = c.n();
  auto seq = lefschetz_sequence(c, zeta_terms(n), subset);
  RatFuncProduct z = zeta_from_sequence(seq, zeta_bound(n));
  std::size_t size = subset.empty() ? c.mf->hol.order() : subset.size();
  if (size == 1 && (subset.empty() || subset[0] == 0)) {
    RatFuncProduct closed = lefschetz_zeta_closed_form(c.D);
    if (!(closed == z)) throw AlgebraError("Lefschetz zeta: recurrence gave " + z.str() + " but the closed form is " + closed.str());
  }
  return z;
}

inline RatFuncProduct nielsen_zeta_direct(const MapCandidate& c) {
  const std::size_t n = c.n();
  return zeta_from_sequence(nielsen_sequence(c, zeta_terms(n)), zeta_bound(n));
}

/// "i1" or "i2", then the parities of p and n, e.g. "i2.eo".
inline std::string cell_label(int index, int p, int n) {
  return std::string(index == 1 ? "i1" : "i2") + "." + (p % 2 == 0 ? "e" : "o") + (n % 2 == 0 ? "e" : "o");
}

struct ZetaResult {
  RatFuncProduct lefschetz;
  std::optional<RatFuncProduct> lefschetz_plus;
  RatFuncProduct nielsen_direct;
  RatFuncProduct nielsen_structural;
  int p = 0, n = 0, index = 1;
  std::string cell;
  bool routes_agree() const { return nielsen_direct == nielsen_structural; }
};

/// N_f from L_f and L_{f+} by the parity table.
inline RatFuncProduct nielsen_zeta_structural(int index, int p, int n, const RatFuncProduct& L,
                                              const RatFuncProduct* Lp) {
  const bool pe = p % 2 == 0, ne = n % 2 == 0;
  if (index == 1) {
    if (pe && ne) return L;
    if (pe) return L.negate_z().reciprocal();
    if (ne) return L.reciprocal();
    return L.negate_z();
  }
  if (!Lp) throw AlgebraError("index two needs the Lefschetz zeta of the positive part");
  if (pe && ne) return *Lp / L;
  if (pe) return (L / *Lp).negate_z();
  if (ne) return L / *Lp;
  return (*Lp / L).negate_z();
}

/// Both routes; agreement is reported, not enforced.
inline ZetaResult compute_zeta(const MapCandidate& c) {
  ZetaResult r;
  EigenClass ec = eigen_classify(c.D);
  PositivePart pp = positive_part(c);
  r.p = ec.p;
  r.n = ec.n;
  r.index = pp.index;
  r.cell = cell_label(r.index, r.p, r.n);
  r.lefschetz = lefschetz_zeta(c);
  if (pp.index == 2) r.lefschetz_plus = lefschetz_zeta(c, pp.F_plus);
  r.nielsen_structural = nielsen_zeta_structural(r.index, r.p, r.n, r.lefschetz, r.lefschetz_plus ? &*r.lefschetz_plus : nullptr);
  r.nielsen_direct = nielsen_zeta_direct(c);
  return r;
}

/// compute_zeta with the route agreement as a hard postcondition.
inline ZetaResult compute_zeta_checked(const MapCandidate& c) {
  ZetaResult r = compute_zeta(c);
  if (!r.routes_agree())
    throw AlgebraError("Nielsen zeta routes disagree: direct " + r.nielsen_direct.str() + ", structural " + r.nielsen_structural.str());
  return r;
}

}  // namespace nzeta
