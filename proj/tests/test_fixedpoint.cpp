#include <gtest/gtest.h>

#include "nzeta/fixedpoint.hpp"

using namespace nzeta;

namespace {

Rational q(long a, long b = 1) { return Rational(BigInt(a), BigInt(b)); }

const Corpus& corpus() {
  static const Corpus c = Corpus::load();
  return c;
}

MapCandidate candidate(const std::string& id, const QMatrix& D, const QVector& d, const Env& params = {}) {
  MapCandidate c{manifold(id, params), d, D};
  if (!validate_selfmap(c)) throw std::runtime_error("test candidate is not a self-map");
  return c;
}

MapCandidate klein(long a, long b) { return candidate("klein-bottle", QMatrix::diagonal({a, b}), {0, q(1, 2)}); }

// cofactor expansion, nothing shared with the engine's elimination
Rational cofactor_det(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0);
  Rational s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    QMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t jj = 0, c = 0; jj < n; ++jj)
        if (jj != j) minor(i - 1, c++) = m(i, jj);
    Rational t = m(0, j) * cofactor_det(minor);
    s += (j % 2 == 0) ? t : -t;
  }
  return s;
}

// brute-force averages over the holonomy, with powers taken afresh each k
std::pair<Rational, Rational> brute_L_N(const MapCandidate& c, unsigned k) {
  const auto& hol = c.mf->hol;
  QMatrix Dk = matrix_power(c.D, k);
  QMatrix I = QMatrix::identity(c.n());
  Rational L = 0, N = 0;
  for (const auto& a : hol.elements) {
    Rational v = cofactor_det(I - a * Dk);
    L += v;
    N += abs(v);
  }
  Rational m = Rational(static_cast<long>(hol.order()));
  return {L / m, N / m};
}

std::vector<MapCandidate> corpus_samples(std::size_t per_family, std::uint64_t salt = 0) {
  std::vector<MapCandidate> out;
  for (const auto& f : corpus().families)
    for (const auto& env : sample_params(f, per_family, salt)) out.push_back(family_instantiate(f, env));
  return out;
}

}  // namespace

TEST(Lefschetz, KleinWorkedExample) {
  auto c = klein(3, 5);
  EXPECT_EQ(lefschetz_number(c, 1), -2);
  EXPECT_EQ(lefschetz_number(c, 2), -8);
  auto L = lefschetz_sequence(c, 40);
  BigInt p3 = 1;
  for (std::size_t k = 0; k < 40; ++k) {
    p3 *= 3;
    EXPECT_EQ(L[k], 1 - p3) << "k = " << k + 1;
  }
}

TEST(Lefschetz, ZeroMapGivesOne) {
  for (const std::string id : {"circle", "klein-bottle", "hantzsche-wendt", "flat3-8"}) {
    auto mf = manifold(id);
    MapCandidate c{mf, QVector(mf->n(), Rational(0)), QMatrix(mf->n(), mf->n())};
    ASSERT_TRUE(validate_selfmap(c)) << id;
    for (std::size_t k = 1; k <= 3; ++k) {
      EXPECT_EQ(lefschetz_number(c, k), 1) << id;
      EXPECT_EQ(nielsen_number(c, k), 1) << id;
    }
  }
}

TEST(Nielsen, Examples) {
  EXPECT_EQ(nielsen_number(klein(3, 5), 1), 10);
  // the table value (1-5z)/(1-15z) gives N(f^k) = 15^k - 5^k
  auto N = nielsen_sequence(klein(3, 5), 12);
  BigInt a = 1, b = 1;
  for (std::size_t k = 0; k < 12; ++k) {
    a *= 15;
    b *= 5;
    EXPECT_EQ(N[k], a - b);
  }
  auto torus = candidate("torus2", QMatrix::identity(2), {0, 0});
  EXPECT_EQ(nielsen_number(torus, 1), 0);
  EXPECT_EQ(lefschetz_number(torus, 1), 0);
}

TEST(Nielsen, AgreesWithBruteForceAveraging) {
  for (const auto& c : corpus_samples(2)) {
    auto L = lefschetz_sequence(c, 6);
    auto N = nielsen_sequence(c, 6);
    for (unsigned k = 1; k <= 6; ++k) {
      auto [bl, bn] = brute_L_N(c, k);
      EXPECT_EQ(Rational(L[k - 1]), bl);
      EXPECT_EQ(Rational(N[k - 1]), bn);
    }
  }
}

TEST(EigenClassify, Examples) {
  auto e = eigen_classify(QMatrix::diagonal({3, 5, -7}));
  EXPECT_EQ(e.p, 2);
  EXPECT_EQ(e.n, 1);
  EXPECT_EQ(e.dim_gt1, 3);

  e = eigen_classify(QMatrix{{2, 1}, {1, 1}});
  EXPECT_EQ(e.p, 1);
  EXPECT_EQ(e.n, 0);
  EXPECT_EQ(e.dim_gt1, 1);
  ASSERT_EQ(e.factors.size(), 1u);
  EXPECT_EQ(e.factors[0].inside, 1);
  EXPECT_EQ(e.factors[0].outside, 1);

  e = eigen_classify(QMatrix{{0, -1}, {1, 0}});
  EXPECT_EQ(e.p, 0);
  EXPECT_EQ(e.n, 0);
  EXPECT_EQ(e.dim_gt1, 0);
  ASSERT_EQ(e.factors.size(), 1u);
  EXPECT_EQ(e.factors[0].on_circle, 2);

  EXPECT_THROW(eigen_classify(QMatrix::identity(4)), AlgebraError);
}

TEST(EigenClassify, UnitRootsStayOnTheCircle) {
  // x - 1 and x + 1 once slipped to the outside
  for (long s : {1L, -1L}) {
    auto e = eigen_classify(QMatrix::diagonal({s}));
    EXPECT_EQ(e.dim_gt1, 0);
    EXPECT_EQ(e.factors.at(0).on_circle, 1);
  }
  auto e = eigen_classify(QMatrix::diagonal({1, -1, 23}));
  EXPECT_EQ(e.p, 1);
  EXPECT_EQ(e.n, 0);
  EXPECT_EQ(e.dim_gt1, 1);
  e = eigen_classify(QMatrix{{1, 1}, {0, 1}});
  EXPECT_EQ(e.dim_gt1, 0);
  EXPECT_EQ(e.factors.at(0).mult, 2);
  // cyclotomic quadratics
  for (auto m : {QMatrix{{0, -1}, {1, 1}}, QMatrix{{0, -1}, {1, -1}}, QMatrix{{0, -1}, {1, 0}}}) {
    auto c = eigen_classify(m);
    EXPECT_EQ(c.dim_gt1, 0);
    EXPECT_EQ(c.factors.at(0).on_circle, 2);
  }
}

TEST(EigenClassify, CountsAddUp) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<long> d(-9, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 3;
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    auto e = eigen_classify(m);
    int total = 0, outside = 0;
    for (const auto& f : e.factors) {
      EXPECT_EQ(f.inside + f.on_circle + f.outside, f.q.degree());
      total += f.q.degree() * f.mult;
      outside += f.outside * f.mult;
    }
    EXPECT_EQ(total, static_cast<int>(n));
    EXPECT_EQ(outside, e.dim_gt1);
    EXPECT_LE(e.p + e.n, e.dim_gt1);
  }
}

TEST(PositivePart, KleinExamples) {
  auto pp = positive_part(klein(3, 5));
  EXPECT_EQ(pp.index, 2);
  EXPECT_EQ(pp.F_plus, std::vector<std::size_t>{0});
  EXPECT_EQ(pp.det_signs, (std::vector<int>{1, -1}));

  pp = positive_part(klein(3, 1));
  EXPECT_EQ(pp.index, 1);
  EXPECT_EQ(eigen_classify(QMatrix::diagonal({3, 1})).dim_gt1, 1);
  EXPECT_TRUE(pp.rho_gt1_identity);

  pp = positive_part(klein(1, -1));
  EXPECT_EQ(pp.index, 1);
  EXPECT_TRUE(pp.rho_gt1_trivial);
}

TEST(PositivePart, HantzscheWendtWithUnitEigenvalues) {
  auto c = candidate("hantzsche-wendt", QMatrix::diagonal({1, -1, 23}), {q(1, 2), q(1, 2), q(1, 2)});
  auto pp = positive_part(c);
  EXPECT_EQ(pp.index, 2);
  ASSERT_EQ(pp.F_plus.size(), 2u);
  for (auto a : pp.F_plus) EXPECT_EQ(c.mf->hol.elements[a](2, 2), 1);
}

TEST(PositivePart, InvariantUnderIteration) {
  for (const auto& c : corpus_samples(2)) {
    auto pp = positive_part(c);
    EXPECT_TRUE(pp.index == 1 || pp.index == 2);
    EXPECT_EQ(pp.index == 1, pp.F_plus.size() == c.mf->hol.order());
    EXPECT_EQ(pp.index * pp.F_plus.size(), c.mf->hol.order());
    for (unsigned k : {2u, 3u}) {
      auto ppk = positive_part(c.power(k));
      EXPECT_EQ(ppk.index, pp.index);
      EXPECT_EQ(ppk.F_plus, pp.F_plus);
    }
  }
}

TEST(PositivePart, IrrationalSplitThroughNumberField) {
  // holonomy {I, -I} and D with charpoly x^3 - x - 1: one real root outside,
  // a complex pair inside; -I acts by -1 on the expanding line
  CatalogEntry e;
  e.id = "test-minus-identity";
  e.dim = 3;
  e.generators.push_back({"g", AffineElement::abelian(QMatrix::diagonal({-1, -1, -1}), {0, 0, 0})});
  for (std::size_t i = 0; i < 3; ++i) {
    QVector t(3, Rational(0));
    t[i] = 1;
    e.generators.push_back({"e" + std::to_string(i + 1), AffineElement::abelian(QMatrix::identity(3), t)});
  }
  MapCandidate c{make_manifold(e), {0, 0, 0}, QMatrix{{0, 0, 1}, {1, 0, 1}, {0, 1, 0}}};
  ASSERT_EQ(charpoly(c.D), QPoly({-1, -1, 0, 1}));
  ASSERT_TRUE(validate_selfmap(c));
  long before = mixed_split_counter().load();
  auto pp = positive_part(c);
  EXPECT_TRUE(pp.used_number_field);
  EXPECT_EQ(pp.index, 2);
  EXPECT_EQ(pp.det_signs, (std::vector<int>{1, -1}));
  EXPECT_EQ(mixed_split_counter().load(), before + 1);
  EXPECT_TRUE(check_sign_relations(c).ok);

  // x^3 - 4x + 2: two roots outside, -I has determinant +1 on that plane
  c.D = QMatrix{{0, 0, -2}, {1, 0, 4}, {0, 1, 0}};
  pp = positive_part(c);
  EXPECT_TRUE(pp.used_number_field);
  EXPECT_EQ(pp.index, 1);
  EXPECT_TRUE(check_sign_relations(c).ok);

  // x^3 - 2x^2 - x + 1: three real roots, only 2.24... outside
  c.D = QMatrix{{0, 0, -1}, {1, 0, 1}, {0, 1, 2}};
  ASSERT_EQ(eigen_classify(c.D).dim_gt1, 1);
  pp = positive_part(c);
  EXPECT_TRUE(pp.used_number_field);
  EXPECT_EQ(pp.index, 2);
  EXPECT_TRUE(check_sign_relations(c).ok);
}

TEST(Anosov, Examples) {
  Env k2{{"k", 2}};
  auto heis = candidate("heis-I", QMatrix{{-1, 0, 0}, {0, 2, 1}, {0, 3, 1}}, {0, 0, 0}, k2);
  EXPECT_TRUE(anosov_fastpath(heis).holds);
  EXPECT_EQ(anosov_fastpath(heis).reason, "trivial holonomy");

  const auto& f37 = *corpus().for_manifold("flat3-7").front();
  auto c37 = family_instantiate(f37, sample_params(f37, 1).at(0));
  EXPECT_TRUE(anosov_fastpath(c37).holds);

  auto k35 = anosov_fastpath(klein(3, 5));
  EXPECT_FALSE(k35.holds);
  EXPECT_EQ(k35.reason, "no criterion applies");
  EXPECT_TRUE(anosov_fastpath(klein(3, 1)).holds);
}

TEST(Anosov, FastPathImpliesTheAnosovRows) {
  std::size_t held = 0;
  for (const auto& c : corpus_samples(3)) {
    auto v = anosov_fastpath(c);
    if (!v.holds) continue;
    ++held;
    EXPECT_EQ(positive_part(c).index, 1) << v.reason;
    auto N = nielsen_sequence(c, 20);
    auto L = lefschetz_sequence(c, 20);
    for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(N[k], big_abs(L[k]));
  }
  EXPECT_GT(held, 100u);
}

TEST(SignRelations, Examples) {
  auto c = klein(3, 5);
  auto Lp = lefschetz_sequence(c, 1, positive_part(c).F_plus);
  EXPECT_EQ(Lp[0], 8);
  EXPECT_EQ(lefschetz_number(c, 1), -2);
  EXPECT_EQ(nielsen_number(c, 1), Lp[0] - lefschetz_number(c, 1));
  EXPECT_TRUE(check_sign_relations(c).ok);

  auto torus = candidate("torus2", QMatrix{{2, 1}, {1, 1}}, {0, 0});
  EXPECT_TRUE(check_sign_relations(torus).ok);
  EXPECT_EQ(nielsen_number(torus, 1), -lefschetz_number(torus, 1));

  auto zero = candidate("hantzsche-wendt", QMatrix(3, 3), {0, 0, 0});
  EXPECT_TRUE(check_sign_relations(zero).ok);
}

TEST(Properties, IntegralAndNielsenDominatesOnExtraSamples) {
  // fresh salt: tuples differ from the ones the table run uses
  auto samples = corpus_samples(8, 0x5eed);
  ASSERT_GE(samples.size(), 500u);
  for (const auto& c : samples) {
    std::vector<BigInt> L, N;
    ASSERT_NO_THROW(L = lefschetz_sequence(c, 40));
    ASSERT_NO_THROW(N = nielsen_sequence(c, 40));
    for (std::size_t k = 0; k < 40; ++k) EXPECT_GE(N[k], big_abs(L[k]));
    EXPECT_TRUE(check_sign_relations(c).ok);
  }
}
