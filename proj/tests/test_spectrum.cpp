#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "nzeta/fixedpoint.hpp"

using namespace nzeta;

namespace {

using cd = std::complex<double>;

std::vector<cd> exact_roots(const EigenClass& ec, std::vector<ModClass>* cls) {
  std::vector<cd> out;
  for (const auto& f : ec.factors)
    for (int m = 0; m < f.mult; ++m)
      for (const auto& r : f.roots) {
        out.emplace_back(r.re, r.im);
        cls->push_back(r.cls);
        if (!r.real) {
          out.emplace_back(r.re, -r.im);
          cls->push_back(r.cls);
        }
      }
  return out;
}

std::vector<cd> eigen_roots(const QMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m(i, j).to_double();
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  std::vector<cd> out;
  for (Eigen::Index i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Eigen's eigenvalues of a defective matrix scatter like eps^(1/mult), so
// compare against the roots of the squarefree factors with the multiplicity
// carried separately.
void expect_matches(const QMatrix& m) {
  SCOPED_TRACE(m.str());
  EigenClass ec = eigen_classify(m);
  std::vector<ModClass> cls;
  auto exact = exact_roots(ec, &cls);
  auto fl = eigen_roots(m);
  ASSERT_EQ(exact.size(), fl.size());
  int max_mult = 1;
  for (const auto& f : ec.factors) max_mult = std::max(max_mult, f.mult);
  const double tol = max_mult == 1 ? 1e-9 : 1e-4;
  std::vector<bool> used(fl.size(), false);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    std::size_t best = fl.size();
    double dist = 1e300;
    for (std::size_t j = 0; j < fl.size(); ++j)
      if (!used[j] && std::abs(fl[j] - exact[i]) < dist) {
        dist = std::abs(fl[j] - exact[i]);
        best = j;
      }
    ASSERT_LT(dist, tol * std::max(1.0, std::abs(exact[i])));
    used[best] = true;
    // exact classes are never up for debate away from the circle
    double mod = std::abs(exact[i]);
    if (mod > 1 + 1e-6) EXPECT_EQ(cls[i], kOutside);
    else if (mod < 1 - 1e-6) EXPECT_EQ(cls[i], kInside);
    else EXPECT_EQ(cls[i], kOnCircle) << "modulus " << mod;
  }
  int p = 0, n = 0, gt1 = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (cls[i] == kOutside) ++gt1;
    if (cls[i] == kOutside && exact[i].imag() == 0) (exact[i].real() > 0 ? p : n)++;
  }
  EXPECT_EQ(ec.p, p);
  EXPECT_EQ(ec.n, n);
  EXPECT_EQ(ec.dim_gt1, gt1);
}

}  // namespace

TEST(Spectrum, MatchesFloatingOracleOnRandomMatrices) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> d(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 3;
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    expect_matches(m);
  }
}

TEST(Spectrum, SmallEntriesHitTheCircleOften) {
  // entries in {-1, 0, 1} produce many roots of unity and repeated roots
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long> d(-1, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + trial % 3;
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    expect_matches(m);
  }
}

TEST(Spectrum, UnitCircleEdgeCases) {
  // companions of x - 1, x + 1, x^2 + 1, x^2 - x + 1, x^2 + x + 1
  const std::vector<QMatrix> cases = {
      QMatrix{{1}}, QMatrix{{-1}}, QMatrix{{0, -1}, {1, 0}}, QMatrix{{0, -1}, {1, 1}}, QMatrix{{0, -1}, {1, -1}},
      QMatrix{{1, 0, 0}, {0, 0, -1}, {0, 1, 1}}, QMatrix{{-1, 0, 0}, {0, 0, -1}, {0, 1, -1}},
      QMatrix{{1, 0, 0}, {0, -1, 0}, {0, 0, 23}}};
  for (const auto& m : cases) {
    expect_matches(m);
    auto ec = eigen_classify(m);
    int on = 0;
    for (const auto& f : ec.factors) on += f.on_circle * f.mult;
    EXPECT_EQ(on + ec.dim_gt1, static_cast<int>(m.rows()));
  }
}
