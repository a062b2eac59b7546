#pragma once

#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "affine_maps.hpp"
#include "factor.hpp"
#include "numberfield.hpp"
#include "sturm.hpp"

namespace nzeta {

enum ModClass { kInside = -1, kOnCircle = 0, kOutside = 1 };

/// One root (or one representative of a complex pair) with float locations
/// for reporting and comparison only; the class itself is exact.
struct RootInfo {
  bool real = true;
  double re = 0;
  double im = 0;  // >= 0; the conjugate is implied
  ModClass cls = kInside;
};

struct FactorClass {
  IntPoly q;
  int mult = 1;
  int inside = 0, on_circle = 0, outside = 0;  // per copy, without multiplicity
  int real_gt1 = 0, real_ltm1 = 0;
  std::vector<RootInfo> roots;

  bool mixed() const { return outside > 0 && inside + on_circle > 0; }
};

struct EigenClass {
  QPoly charpoly;
  std::vector<FactorClass> factors;
  int p = 0;
  int n = 0;
  int dim_gt1 = 0;
  int degree = 0;
};

namespace detail {

inline double approx_root(const QPoly& sf, const RootInterval& iv) {
  if (iv.exact) return iv.lo.to_double();
  RootInterval r = refine_root(sf, iv, Rational(1) / Rational(BigInt("1000000000000000000")));
  return ((r.lo + r.hi) / Rational(2)).to_double();
}

inline ModClass class_of(const Rational& modulus_sq) {
  if (modulus_sq < Rational(1)) return kInside;
  if (modulus_sq == Rational(1)) return kOnCircle;
  return kOutside;
}

inline ModClass class_of_real(const QPoly& q, const RootInterval& iv) {
  if (iv.exact) return class_of(iv.lo * iv.lo);
  if (q.degree() == 1) {
    Rational root = -q[0] / q[1];
    return class_of(root * root);
  }
  for (const Rational& e : {Rational(-1), Rational(1)})
    if (q.eval(e).is_zero() && iv.lo < e && e < iv.hi) return kOnCircle;
  // irrational roots are never +-1
  if (sturm_count(q, Rational(-1), Rational(1)) == 0) return kOutside;
  RootInterval r = iv;
  while (true) {
    if (r.hi <= Rational(-1) || r.lo >= Rational(1)) return kOutside;
    if (r.lo >= Rational(-1) && r.hi <= Rational(1)) return kInside;
    r = refine_root(q, r, (r.hi - r.lo) / Rational(2));
    if (r.exact) return class_of(r.lo * r.lo);
  }
}

inline FactorClass classify_factor(const IntPoly& q, int mult) {
  FactorClass fc;
  fc.q = q;
  fc.mult = mult;
  QPoly f = monic(to_qpoly(q));
  const int deg = f.degree();
  auto reals = isolate_real_roots(f);
  for (const auto& iv : reals) {
    RootInfo r;
    r.real = true;
    r.re = approx_root(f, iv);
    r.cls = class_of_real(f, iv);
    fc.roots.push_back(r);
  }
  const int n_real = static_cast<int>(reals.size());
  if (n_real < deg) {
    if (deg == 2) {
      // |lambda|^2 = constant term of the monic quadratic
      RootInfo r;
      r.real = false;
      r.cls = class_of(f[0]);
      r.re = (-f[1] / Rational(2)).to_double();
      r.im = std::sqrt(std::max(0.0, f[0].to_double() - r.re * r.re));
      fc.roots.push_back(r);
    } else if (deg == 3 && n_real == 1) {
      // |mu|^2 = |c0| / |theta|; compare |theta| with |c0| by a Sturm count
      Rational c = abs(f[0]);
      bool theta_small = sturm_count(f, -c, c) == 1;
      RootInfo r;
      r.real = false;
      r.cls = theta_small ? kOutside : kInside;
      double theta = fc.roots[0].re;
      r.re = (-f[2].to_double() - theta) / 2.0;
      double msq = std::fabs(f[0].to_double() / theta);
      r.im = std::sqrt(std::max(0.0, msq - r.re * r.re));
      fc.roots.push_back(r);
    } else {
      throw AlgebraError("eigen_classify: factor of degree " + std::to_string(deg) + " is not supported");
    }
  }
  for (const auto& r : fc.roots) {
    int w = r.real ? 1 : 2;
    (r.cls == kInside ? fc.inside : r.cls == kOnCircle ? fc.on_circle : fc.outside) += w;
  }
  fc.real_gt1 = sturm_count(f, Rational(1), std::nullopt);
  fc.real_ltm1 = sturm_count(f, std::nullopt, Rational(-1));
  return fc;
}

}  // namespace detail

inline EigenClass eigen_classify(const QMatrix& d) {
  if (!d.is_square() || d.rows() > 3 || d.rows() < 1) throw AlgebraError("eigen_classify: needs a square matrix of size 1..3");
  EigenClass ec;
  ec.charpoly = charpoly(d);
  ec.degree = ec.charpoly.degree();
  auto fz = factor_over_q(integer_primitive(ec.charpoly).first);
  for (const auto& [q, m] : fz.factors) {
    FactorClass fc = detail::classify_factor(q, m);
    ec.p += fc.real_gt1 * m;
    ec.n += fc.real_ltm1 * m;
    ec.dim_gt1 += fc.outside * m;
    ec.factors.push_back(std::move(fc));
  }
  return ec;
}

/// Counts how often the irrational split (a factor whose roots straddle the
/// unit circle) was needed.
inline std::atomic<long>& mixed_split_counter() {
  static std::atomic<long> c{0};
  return c;
}

struct PositivePart {
  int index = 1;
  std::vector<std::size_t> F_plus;   // holonomy indices with sign +1
  std::vector<int> det_signs;        // det(rho_{>1}(A)) per holonomy element
  bool rho_gt1_trivial = false;      // no eigenvalues of modulus > 1
  bool rho_gt1_identity = false;     // every A acts trivially on the > 1 part
  bool used_number_field = false;
};

namespace detail {

using KMatrix = Matrix<NumberFieldElem>;

inline KMatrix lift(const QMatrix& m) {
  KMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = NumberFieldElem(m(i, j));
  return out;
}

inline QMatrix eval_at(const QPoly& q, const QMatrix& m) {
  QMatrix acc(m.rows(), m.cols());
  for (int i = q.degree(); i >= 0; --i) acc = acc * m + q[static_cast<std::size_t>(i)] * QMatrix::identity(m.rows());
  return acc;
}

/// An isolating interval for the real root of q that lies inside [-1, 1]
/// (want_inside) or outside it.
inline RootInterval pick_root(const QPoly& q, bool want_inside) {
  for (auto iv : isolate_real_roots(q)) {
    if ((class_of_real(q, iv) != kOutside) == want_inside) {
      // shrink so that the interval lies on one side of +-1
      while (!(iv.hi <= Rational(-1) || iv.lo >= Rational(1) || (iv.lo >= Rational(-1) && iv.hi <= Rational(1))))
        iv = refine_root(q, iv, (iv.hi - iv.lo) / Rational(2));
      return iv;
    }
  }
  throw AlgebraError("positive_part: no real root on the requested side of the unit circle");
}

}  // namespace detail

/// The subgroup of holonomy elements acting with determinant 1 on the
/// modulus > 1 part of D*. The modulus <= 1 generalized eigenspace V is the
/// kernel of h(D*), h collecting the factors with roots of modulus <= 1; it
/// is invariant under the holonomy, and det rho_{>1}(A) = det A / det(A|V).
inline PositivePart positive_part(const MapCandidate& c) {
  const Manifold& mf = *c.mf;
  const std::size_t n = c.n();
  const std::size_t m = mf.hol.order();
  EigenClass ec = eigen_classify(c.D);
  PositivePart pp;
  pp.det_signs.assign(m, 1);
  if (ec.dim_gt1 == 0) {
    pp.rho_gt1_trivial = true;
    pp.rho_gt1_identity = true;
    for (std::size_t i = 0; i < m; ++i) pp.F_plus.push_back(i);
    return pp;
  }

  std::vector<detail::KMatrix> rho_gt1(m);
  if (static_cast<std::size_t>(ec.dim_gt1) == n) {
    for (std::size_t i = 0; i < m; ++i) {
      Rational dt = det(mf.hol.elements[i]);
      pp.det_signs[i] = dt.sign();
      rho_gt1[i] = detail::lift(mf.hol.elements[i]);
    }
  } else {
    QPoly h_rat = QPoly::constant(1);
    const FactorClass* mixed = nullptr;
    for (const auto& fc : ec.factors) {
      if (fc.mixed()) {
        if (mixed) throw AlgebraError("positive_part: more than one mixed factor");
        mixed = &fc;
        continue;
      }
      if (fc.outside == 0)
        for (int j = 0; j < fc.mult; ++j) h_rat = h_rat * to_qpoly(fc.q);
    }
    detail::KMatrix H = detail::lift(detail::eval_at(h_rat, c.D));
    if (mixed) {
      ++mixed_split_counter();
      pp.used_number_field = true;
      if (mixed->mult != 1) throw AlgebraError("positive_part: repeated mixed factor");
      QPoly f = monic(to_qpoly(mixed->q));
      const int deg = f.degree();
      // a cubic splits 1+2; the lone root is real whichever side it is on
      bool root_inside = deg == 2 || mixed->inside + mixed->on_circle == 1;
      RootInterval iv = detail::pick_root(f, deg == 2 ? true : root_inside);
      auto field = NumberField::make(mixed->q, iv.lo, iv.hi);
      NumberFieldElem theta = NumberFieldElem::theta(field);
      detail::KMatrix Dk = detail::lift(c.D);
      detail::KMatrix I = detail::lift(QMatrix::identity(n));
      detail::KMatrix part(n, n);
      if (root_inside) {
        part = Dk - theta * I;
      } else {
        // f / (x - theta) = x^2 + (a2 + theta) x + (a1 + theta (a2 + theta))
        NumberFieldElem b1 = NumberFieldElem(f[2]) + theta;
        NumberFieldElem b0 = NumberFieldElem(f[1]) + theta * b1;
        part = Dk * Dk + b1 * Dk + b0 * I;
      }
      H = H * part;
    }
    auto basis = kernel(H);
    const std::size_t dle = n - static_cast<std::size_t>(ec.dim_gt1);
    if (basis.size() != dle) throw AlgebraError("positive_part: generalized eigenspace has the wrong dimension");
    // complete the basis of V to one of the whole space with unit vectors
    detail::KMatrix Bm(n, n);
    for (std::size_t j = 0; j < dle; ++j)
      for (std::size_t i = 0; i < n; ++i) Bm(i, j) = basis[j][i];
    std::size_t col = dle;
    for (std::size_t e = 0; e < n && col < n; ++e) {
      detail::KMatrix trial = Bm;
      for (std::size_t i = 0; i < n; ++i) trial(i, col) = NumberFieldElem(i == e ? 1 : 0);
      if (rank(trial.block(0, 0, n, col + 1)) == col + 1) {
        Bm = trial;
        ++col;
      }
    }
    detail::KMatrix Binv = inverse(Bm);
    for (std::size_t a = 0; a < m; ++a) {
      detail::KMatrix conj = Binv * detail::lift(mf.hol.elements[a]) * Bm;
      for (std::size_t i = dle; i < n; ++i)
        for (std::size_t j = 0; j < dle; ++j)
          if (!conj(i, j).is_zero()) throw AlgebraError("positive_part: holonomy does not preserve the modulus <= 1 part");
      NumberFieldElem dv = det(conj.block(dle, dle, n - dle, n - dle));
      auto r = dv.as_rational();
      if (!r || !(abs(*r) == Rational(1))) throw AlgebraError("positive_part: det rho_{>1} is not +-1");
      if (nf_sign(dv) != r->sign()) throw AlgebraError("positive_part: sign evaluation disagrees");
      pp.det_signs[a] = r->sign();
      rho_gt1[a] = conj.block(dle, dle, n - dle, n - dle);
    }
  }

  pp.rho_gt1_identity = true;
  for (std::size_t a = 0; a < m; ++a) {
    const auto& r = rho_gt1[a];
    for (std::size_t i = 0; i < r.rows(); ++i)
      for (std::size_t j = 0; j < r.cols(); ++j)
        if (!(r(i, j) == NumberFieldElem(i == j ? 1 : 0))) pp.rho_gt1_identity = false;
    if (pp.det_signs[a] > 0) pp.F_plus.push_back(a);
  }
  pp.index = static_cast<int>(m / pp.F_plus.size());
  if (pp.F_plus.size() * static_cast<std::size_t>(pp.index) != m || pp.index > 2)
    throw AlgebraError("positive_part: index is not 1 or 2");
  for (auto a : pp.F_plus)
    for (auto b : pp.F_plus)
      if (pp.det_signs[mf.hol.table[a][b]] < 0) throw AlgebraError("positive_part: F+ is not closed");
  return pp;
}

/// All holonomy indices.
inline std::vector<std::size_t> full_holonomy(const MapCandidate& c) {
  std::vector<std::size_t> all(c.mf->hol.order());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

namespace detail {

/// det(I - A D^k) for every A in subset, k = 1..kmax, summed (absolute values if requested).
inline std::vector<BigInt> averaged_sequence(const MapCandidate& c, const std::vector<std::size_t>& subset,
                                             std::size_t kmax, bool absolute) {
  if (subset.empty()) throw AlgebraError("averaging over an empty set");
  const std::size_t n = c.n();
  QMatrix I = QMatrix::identity(n);
  QMatrix Dk = I;
  std::vector<BigInt> out;
  out.reserve(kmax);
  for (std::size_t k = 1; k <= kmax; ++k) {
    Dk = Dk * c.D;
    Rational sum = 0;
    for (auto a : subset) {
      Rational v = det(I - c.mf->hol.elements[a] * Dk);
      sum += absolute ? abs(v) : v;
    }
    Rational avg = sum / Rational(static_cast<long>(subset.size()));
    if (!avg.is_integer())
      throw AlgebraError("averaging formula gave the non-integer " + avg.str() + " at k = " + std::to_string(k));
    out.push_back(avg.num());
  }
  return out;
}

}  // namespace detail

/// L(f^k) for k = 1..kmax, averaged over the given holonomy elements (all by default).
inline std::vector<BigInt> lefschetz_sequence(const MapCandidate& c, std::size_t kmax,
                                              const std::vector<std::size_t>& subset = {}) {
  return detail::averaged_sequence(c, subset.empty() ? full_holonomy(c) : subset, kmax, false);
}

inline std::vector<BigInt> nielsen_sequence(const MapCandidate& c, std::size_t kmax) {
  auto N = detail::averaged_sequence(c, full_holonomy(c), kmax, true);
  auto L = lefschetz_sequence(c, kmax);
  for (std::size_t i = 0; i < kmax; ++i)
    if (N[i] < big_abs(L[i])) throw AlgebraError("N(f^k) < |L(f^k)| at k = " + std::to_string(i + 1));
  return N;
}

inline BigInt lefschetz_number(const MapCandidate& c, std::size_t k) { return lefschetz_sequence(c, k).back(); }
inline BigInt nielsen_number(const MapCandidate& c, std::size_t k) { return nielsen_sequence(c, k).back(); }

struct AnosovVerdict {
  bool holds = false;
  std::string reason;  // which criterion applied
};

/// Sufficient conditions for N(f) = |L(f)|; "unknown" is never "fails".
inline AnosovVerdict anosov_fastpath(const MapCandidate& c, const PositivePart* pp = nullptr) {
  const HolonomyGroup& h = c.mf->hol;
  const std::size_t m = h.order();
  if (m == 1) return {true, "trivial holonomy"};
  // cyclic with a generator free of eigenvalue -1
  for (std::size_t g = 0; g < m; ++g) {
    std::size_t ord = 1, x = g;
    while (x != 0) {
      x = h.table[x][g];
      ++ord;
    }
    if (ord == m) {
      if (!charpoly(h.elements[g]).eval(Rational(-1)).is_zero()) return {true, "cyclic holonomy, generator without eigenvalue -1"};
      break;
    }
  }
  // no index-two subgroup iff the squares generate everything
  std::vector<bool> in(m, false);
  std::vector<std::size_t> sq;
  for (std::size_t g = 0; g < m; ++g)
    if (!in[h.table[g][g]]) {
      in[h.table[g][g]] = true;
      sq.push_back(h.table[g][g]);
    }
  for (std::size_t i = 0; i < sq.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j)
      for (auto p : {h.table[sq[i]][sq[j]], h.table[sq[j]][sq[i]]})
        if (!in[p]) {
          in[p] = true;
          sq.push_back(p);
        }
  if (sq.size() == m) return {true, "holonomy without index-two subgroups"};
  PositivePart local;
  if (!pp) {
    local = positive_part(c);
    pp = &local;
  }
  if (pp->rho_gt1_trivial) return {true, "no eigenvalues of modulus > 1"};
  if (pp->rho_gt1_identity) return {true, "rho_{>1} is the identity representation"};
  return {false, "no criterion applies"};
}

struct SignReport {
  bool ok = true;
  std::size_t first_bad_k = 0;
  std::string detail;
};

inline constexpr std::size_t kSignChecks = 40;

/// N(f^k) = (-1)^p X (k odd) or (-1)^(p+n) X (k even), with X = L(f^k) when
/// the positive part is everything and L(f+^k) - L(f^k) otherwise.
inline SignReport check_sign_relations(const MapCandidate& c, std::size_t kmax = kSignChecks) {
  EigenClass ec = eigen_classify(c.D);
  PositivePart pp = positive_part(c);
  auto N = nielsen_sequence(c, kmax);
  auto L = lefschetz_sequence(c, kmax);
  std::vector<BigInt> Lp;
  if (pp.index == 2) Lp = lefschetz_sequence(c, kmax, pp.F_plus);
  for (std::size_t k = 1; k <= kmax; ++k) {
    BigInt x = pp.index == 1 ? L[k - 1] : BigInt(Lp[k - 1] - L[k - 1]);
    int e = (k % 2 == 1) ? ec.p : ec.p + ec.n;
    BigInt rhs = (e % 2 == 0) ? x : BigInt(-x);
    if (N[k - 1] != rhs) {
      SignReport r;
      r.ok = false;
      r.first_bad_k = k;
      r.detail = "k = " + std::to_string(k) + ": N = " + N[k - 1].get_str() + " but the relation gives " + rhs.get_str();
      return r;
    }
  }
  return {};
}

}  // namespace nzeta
