// acceptance: one PASS/FAIL line per acceptance criterion. Exits non-zero
// when any criterion fails.

#include <Eigen/Dense>
#include <chrono>
#include <complex>
#include <iostream>
#include <random>

#include <nzeta/nzeta.hpp>

using namespace nzeta;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

void report(int n, const std::string& name, const Verdict& v, bool* all) {
  std::cout << (v.ok ? "PASS" : "FAIL") << " " << n << " " << name << ": " << v.detail << "\n";
  *all = *all && v.ok;
}

const Corpus& corpus() {
  static const Corpus c = Corpus::load();
  return c;
}

std::vector<MapCandidate> samples(std::size_t per_family, std::uint64_t salt) {
  std::vector<MapCandidate> out;
  for (const auto& f : corpus().families)
    for (const auto& env : sample_params(f, per_family, salt)) out.push_back(family_instantiate(f, env));
  return out;
}

// Leibniz expansion; n <= 3 here
Rational leibniz_det(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

std::vector<std::complex<double>> float_eigenvalues(const QMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(i, j).to_double();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

struct Averages {
  std::vector<Rational> L, Lplus, N;
};

Averages brute_averages(const MapCandidate& c, const std::vector<std::size_t>& plus, std::size_t kmax) {
  const auto& els = c.mf->hol.elements;
  QMatrix I = QMatrix::identity(c.n());
  Averages out;
  for (std::size_t k = 1; k <= kmax; ++k) {
    QMatrix Dk = I;
    for (std::size_t j = 0; j < k; ++j) Dk = Dk * c.D;
    Rational l = 0, n = 0, lp = 0;
    for (std::size_t a = 0; a < els.size(); ++a) {
      Rational v = leibniz_det(I - els[a] * Dk);
      l += v;
      n += abs(v);
    }
    for (auto a : plus) lp += leibniz_det(I - els[a] * Dk);
    out.L.push_back(l / Rational(static_cast<long>(els.size())));
    out.N.push_back(n / Rational(static_cast<long>(els.size())));
    out.Lplus.push_back(plus.empty() ? Rational(0) : lp / Rational(static_cast<long>(plus.size())));
  }
  return out;
}

Verdict tables() {
  auto t0 = std::chrono::steady_clock::now();
  VerifySummary s = verify_tables(corpus(), 3);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Verdict v;
  v.ok = s.ok() && s.empty_families == 0 && secs < 60;
  v.detail = std::to_string(s.families) + " families, " + std::to_string(s.passed) + "/" +
             std::to_string(s.instances) + " instances in " + std::to_string(static_cast<int>(secs)) + " s";
  if (s.empty_families) v.detail += ", " + std::to_string(s.empty_families) + " families without samples";
  std::vector<std::string> seen;
  for (const auto& f : s.failures)
    if (std::find(seen.begin(), seen.end(), f.family) == seen.end()) seen.push_back(f.family);
  if (!seen.empty()) {
    v.detail += "; failing rows:";
    for (const auto& f : seen) v.detail += " " + f;
  }
  return v;
}

Verdict klein_example() {
  Verdict v{true, "L(f^k) = 1 - 3^k for k = 1..40 and L_f = (1-3z)/(1-z), b in {1, 5, -3, 7}"};
  RatFuncProduct want = RatFuncProduct::from_ratfn(QPoly({1, -3}), QPoly({1, -1}));
  for (long b : {1, 5, -3, 7}) {
    MapCandidate c{manifold("klein-bottle"), QVector(2, Rational(0)), QMatrix::diagonal({3, b})};
    if (!validate_selfmap(c)) return {false, "diag(3, " + std::to_string(b) + ") rejected"};
    auto L = lefschetz_sequence(c, 40);
    BigInt p = 1;
    for (std::size_t k = 0; k < 40; ++k) {
      p *= 3;
      if (L[k] != 1 - p) return {false, "b = " + std::to_string(b) + ", k = " + std::to_string(k + 1)};
    }
    if (lefschetz_zeta(c) != want) return {false, "L_f = " + lefschetz_zeta(c).str()};
  }
  return v;
}

Verdict routes() {
  std::size_t count = 0;
  for (const auto& c : samples(2, 0)) {
    ++count;
    ZetaResult r = compute_zeta(c);
    if (!r.routes_agree()) return {false, "routes disagree on " + c.D.str()};
    auto N = nielsen_sequence(c, 40);
    auto nd = r.nielsen_direct.log_derivative(40), ns = r.nielsen_structural.log_derivative(40);
    for (std::size_t k = 0; k < 40; ++k)
      if (nd[k] != Rational(N[k]) || ns[k] != Rational(N[k])) return {false, "series mismatch on " + c.D.str()};
  }
  return {count >= 150, std::to_string(count) + " instances, both routes reproduce N(f^k) for k = 1..40"};
}

Verdict sign_relations() {
  std::size_t count = 0;
  for (const auto& c : samples(3, 0)) {
    ++count;
    PositivePart pp = positive_part(c);
    Averages av = brute_averages(c, pp.index == 2 ? pp.F_plus : std::vector<std::size_t>{}, 40);
    int p = 0, n = 0;
    for (auto z : float_eigenvalues(c.D)) {
      if (std::abs(z.imag()) > 1e-7) continue;
      if (z.real() > 1 + 1e-4) ++p;
      if (z.real() < -1 - 1e-4) ++n;
    }
    for (std::size_t k = 1; k <= 40; ++k) {
      Rational x = pp.index == 1 ? av.L[k - 1] : av.Lplus[k - 1] - av.L[k - 1];
      int e = k % 2 == 1 ? p : p + n;
      if (av.N[k - 1] != (e % 2 == 0 ? x : -x))
        return {false, "k = " + std::to_string(k) + " on " + c.D.str() + " over " + c.mf->entry.id};
    }
    if (!check_sign_relations(c).ok) return {false, "library check disagrees on " + c.D.str()};
  }
  return {true, std::to_string(count) + " instances, k = 1..40"};
}

Verdict integrality() {
  std::size_t count = 0, extra = 0;
  auto base = samples(3, 0), more = samples(8, 0x5eed);
  for (auto* set : {&base, &more})
    for (const auto& c : *set) {
      ++count;
      extra += set == &more;
      auto av = brute_averages(c, {}, 40);
      for (std::size_t k = 0; k < 40; ++k) {
        if (!av.L[k].is_integer() || !av.N[k].is_integer())
          return {false, "non-integral average at k = " + std::to_string(k + 1) + " on " + c.D.str()};
        if (av.N[k] < abs(av.L[k])) return {false, "N < |L| at k = " + std::to_string(k + 1) + " on " + c.D.str()};
      }
    }
  return {extra >= 500, std::to_string(count) + " candidates (" + std::to_string(extra) + " randomized), k = 1..40"};
}

Verdict closed_form() {
  std::mt19937_64 rng(100);
  std::uniform_int_distribution<long> d(-9, 9);
  const char* ids[] = {"circle", "torus2", "torus3"};
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + trial % 3;
    QMatrix D(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) D(i, j) = d(rng);
    MapCandidate c{manifold(ids[n - 1]), QVector(n, Rational(0)), D};
    if (zeta_from_sequence(lefschetz_sequence(c, zeta_terms(n)), zeta_bound(n)) != lefschetz_zeta_closed_form(D))
      return {false, D.str()};
  }
  return {true, "100 random matrices, n in {1, 2, 3}"};
}

// every exact root must sit within tol of a distinct float eigenvalue and
// carry the class its float modulus implies
bool spectrum_matches(const QMatrix& m) {
  EigenClass ec = eigen_classify(m);
  auto fl = float_eigenvalues(m);
  std::vector<bool> used(fl.size(), false);
  std::size_t total = 0;
  for (const auto& f : ec.factors) {
    const double tol = f.mult == 1 ? 1e-9 : 1e-4;
    for (int rep = 0; rep < f.mult; ++rep)
      for (const auto& r : f.roots)
        for (int conj = 0; conj < (r.real ? 1 : 2); ++conj) {
          std::complex<double> z(r.re, conj ? -r.im : r.im);
          std::size_t best = fl.size();
          double dist = 1e300;
          for (std::size_t j = 0; j < fl.size(); ++j)
            if (!used[j] && std::abs(fl[j] - z) < dist) dist = std::abs(fl[j] - z), best = j;
          if (best == fl.size() || dist > tol * std::max(1.0, std::abs(z))) return false;
          used[best] = true;
          ++total;
          double mod = std::abs(z);
          ModClass want = mod > 1 + 1e-6 ? kOutside : mod < 1 - 1e-6 ? kInside : kOnCircle;
          if (r.cls != want) return false;
        }
  }
  return total == fl.size();
}

Verdict spectrum() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 3;
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    if (!spectrum_matches(m)) return {false, m.str()};
  }
  // companions of x - 1, x + 1, x^2 + 1, x^2 - x + 1, x^2 + x + 1
  const std::vector<QMatrix> edge = {QMatrix{{1}}, QMatrix{{-1}}, QMatrix{{0, -1}, {1, 0}}, QMatrix{{0, -1}, {1, 1}},
                                     QMatrix{{0, -1}, {1, -1}}};
  for (const auto& m : edge) {
    EigenClass ec = eigen_classify(m);
    for (const auto& f : ec.factors)
      if (f.on_circle != static_cast<int>(f.q.degree()) || f.inside || f.outside) return {false, m.str()};
    if (!spectrum_matches(m)) return {false, m.str()};
  }
  return {true, "200 random matrices and 5 unit-circle factors"};
}

}  // namespace

int main() {
  bool all = true;
  auto guarded = [](Verdict (*fn)()) {
    try {
      return fn();
    } catch (const std::exception& e) {
      return Verdict{false, std::string("threw: ") + e.what()};
    }
  };
  report(1, "table reproduction", guarded(tables), &all);
  report(2, "Klein bottle worked example", guarded(klein_example), &all);
  report(3, "route equivalence", guarded(routes), &all);
  report(4, "sign relations", guarded(sign_relations), &all);
  report(5, "integrality and N >= |L|", guarded(integrality), &all);
  report(6, "closed form vs recurrence", guarded(closed_form), &all);
  report(7, "spectrum classification", guarded(spectrum), &all);
  return all ? 0 : 1;
}
