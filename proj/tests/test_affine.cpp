#include <gtest/gtest.h>

#include <cctype>
#include <set>

#include "nzeta/affine_maps.hpp"

using namespace nzeta;

namespace {

Rational q(long a, long b = 1) { return Rational(BigInt(a), BigInt(b)); }

const Corpus& corpus() {
  static const Corpus c = Corpus::load();
  return c;
}

MapCandidate candidate(const std::string& id, const QMatrix& D, const QVector& d, const Env& params = {}) {
  return MapCandidate{manifold(id, params), d, D};
}

// f gamma f^-1 lies in the group for every generator; only for invertible D.
// Membership: strip the holonomy representative, what is left must be a
// lattice element.
bool conjugation_oracle(const MapCandidate& c) {
  const Manifold& mf = *c.mf;
  AffineElement f = c.embed();
  AffineElement finv = f.inverse();
  for (const auto& g : mf.entry.generators) {
    AffineElement x = f * g.elem * finv;
    std::size_t b = mf.hol.index_of(x.rot());
    if (b == mf.hol.order()) return false;
    if (!lattice_member(x * mf.hol.representatives[b].inverse())) return false;
  }
  return true;
}

bool invertible(const QMatrix& m) { return !det(m).is_zero(); }

Rational violating_shift(const std::string& dom) {
  if (dom == "odd" || dom == "even" || dom.rfind("int%", 0) == 0) return 1;
  if (dom == "Z/2" || dom == "Z/4-Z/2") return q(1, 4);
  if (dom == "Z/2-Z") return q(1, 2);
  if (dom == "Z/3") return q(1, 6);
  if (dom.size() > 2 && dom.substr(dom.size() - 2) == "+Z") return q(1, 3);
  return 0;
}

bool is_name(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  return true;
}

// Reads the parameters of g off the entries of c that are bare names, then
// checks that g's constraints hold and that g reproduces c exactly.
bool belongs_to(const FamilySpec& g, const MapCandidate& c) {
  std::set<std::string> names;
  for (const auto& p : g.params) names.insert(p.name);
  Env env;
  auto bind = [&](const std::string& t, const Rational& v) {
    if (!is_name(t) || !names.count(t)) return true;
    auto [it, fresh] = env.emplace(t, v);
    return fresh || it->second == v;
  };
  for (std::size_t i = 0; i < c.n(); ++i) {
    for (std::size_t j = 0; j < c.n(); ++j)
      if (!bind(g.D[i][j], c.D(i, j))) return false;
    if (!bind(g.d[i], c.d[i])) return false;
  }
  if (names.count("k")) env.emplace("k", c.mf->entry.k);
  if (env.size() != names.size()) return false;
  try {
    MapCandidate c2 = family_candidate(g, family_env(g, env));
    return c2.D == c.D && c2.d == c.d;
  } catch (const std::exception&) {
    return false;
  }
}

// Self-maps of flat3-3 that no listed family covers: the image of alpha
// keeps the identity rotation while e2, e3 go to alpha-cosets. Derived by
// solving the defining equation by hand for a, c even.
FamilySpec flat3_3_unlisted() {
  return parse_family(nlohmann::json::parse(R"js({
    "manifold": "flat3-3", "index": 0,
    "params": [["a","even"],["c","even"],["b","Z/2-Z"],["d","int"],["r","real"],["s","real"],["t","real"]],
    "when": ["isint(s - t)"],
    "D": [["a","b","b"],["c","d","d"],["c","d","d"]], "d": ["r","s","t"], "zeta": []})js"));
}

}  // namespace

TEST(HeisEndoCheck, Examples) {
  EXPECT_TRUE(heis_endo_check(QMatrix{{1, 5, 7}, {0, 2, 1}, {0, 1, 1}}));
  EXPECT_TRUE(heis_endo_check(QMatrix::identity(3)));
  EXPECT_FALSE(heis_endo_check(QMatrix{{2, 0, 0}, {0, 2, 1}, {0, 1, 1}}));
  EXPECT_FALSE(heis_endo_check(QMatrix{{1, 0, 0}, {1, 2, 1}, {0, 1, 1}}));
  EXPECT_FALSE(heis_endo_check(QMatrix::identity(2)));
}

TEST(ValidateSelfmap, KleinExamples) {
  EXPECT_TRUE(validate_selfmap(candidate("klein-bottle", QMatrix{{3, 0}, {0, 5}}, {0, q(1, 2)})));
  EXPECT_FALSE(validate_selfmap(candidate("klein-bottle", QMatrix{{3, 0}, {0, 5}}, {0, q(1, 4)})));
  // alpha forces a second column of zeros or a diagonal D, and an odd a
  // then needs s in Z/4 minus Z/2
  EXPECT_FALSE(validate_selfmap(candidate("klein-bottle", QMatrix{{3, 0}, {0, 0}}, {0, 0})));
  EXPECT_TRUE(validate_selfmap(candidate("klein-bottle", QMatrix{{3, 0}, {0, 0}}, {0, q(1, 4)})));
  EXPECT_FALSE(validate_selfmap(candidate("klein-bottle", QMatrix{{1, 1}, {0, 1}}, {0, 0})));
  EXPECT_FALSE(validate_selfmap(candidate("klein-bottle", QMatrix{{2, 0}, {0, 5}}, {0, q(1, 2)})));
}

TEST(ValidateSelfmap, IdentityIsValidEverywhere) {
  for (const auto& id : Catalog::builtin().ids()) {
    SCOPED_TRACE(id);
    Env params;
    if (Catalog::builtin().is_heisenberg(id)) {
      for (long k = 1; k <= 12 && params.empty(); ++k) {
        try {
          catalog_lookup(id, {{"k", Rational(k)}});
          params["k"] = k;
        } catch (const ConstraintError&) {
        }
      }
    }
    auto mf = manifold(id, params);
    MapCandidate c{mf, QVector(mf->n(), Rational(0)), QMatrix::identity(mf->n())};
    auto phi = validate_selfmap(c);
    ASSERT_TRUE(phi);
    ASSERT_EQ(phi->items.size(), mf->entry.generators.size());
    for (std::size_t i = 0; i < phi->items.size(); ++i) {
      const auto& gen = mf->entry.generators[i];
      EXPECT_EQ(phi->items[i].generator, gen.name);
      EXPECT_EQ(phi->items[i].holonomy_index, mf->hol.index_of(gen.elem.rot()));
    }
  }
}

TEST(ValidateSelfmap, ShapeErrors) {
  EXPECT_THROW(validate_selfmap(candidate("klein-bottle", QMatrix::identity(3), {0, 0})), std::invalid_argument);
  EXPECT_THROW(validate_selfmap(candidate("klein-bottle", QMatrix::identity(2), {0})), std::invalid_argument);
  QMatrix bad{{2, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_THROW(validate_selfmap(candidate("heis-I", bad, {0, 0, 0}, {{"k", 1}})), std::invalid_argument);
}

TEST(ValidateSelfmap, HeisenbergIdentityLike) {
  auto c = candidate("heis-I", QMatrix::identity(3), {0, 0, 0}, {{"k", 2}});
  EXPECT_TRUE(validate_selfmap(c));
  // central translations commute with everything; h(1/2,0,0) conjugates b to b c^(k/2)
  EXPECT_TRUE(validate_selfmap(candidate("heis-I", QMatrix::identity(3), {0, 0, q(5, 2)}, {{"k", 2}})));
  EXPECT_TRUE(validate_selfmap(candidate("heis-I", QMatrix::identity(3), {q(1, 2), 0, 0}, {{"k", 2}})));
  EXPECT_FALSE(validate_selfmap(candidate("heis-I", QMatrix::identity(3), {q(1, 2), 0, 0}, {{"k", 1}})));
  // type II: alpha needs D to commute with diag(1,-1,-1) up to holonomy
  QMatrix shear{{1, 0, 0}, {0, 1, 1}, {0, 0, 1}};
  EXPECT_TRUE(validate_selfmap(candidate("heis-II", shear, {0, 0, 0}, {{"k", 2}})));
}

TEST(FamilyInstantiate, Examples) {
  const auto& hw = *corpus().for_manifold("hantzsche-wendt").front();
  Env p{{"a", 3}, {"b", 5}, {"c", 7}, {"r", q(1, 2)}, {"s", 0}, {"t", q(1, 2)}};
  MapCandidate c = family_instantiate(hw, p);
  EXPECT_EQ(c.D, (QMatrix{{3, 0, 0}, {0, 5, 0}, {0, 0, 7}}));
  EXPECT_EQ(c.d, (QVector{q(1, 2), 0, q(1, 2)}));

  const auto& klein2 = *corpus().for_manifold("klein-bottle").at(1);
  Env k{{"a", 3}, {"b", 5}, {"r", 0}, {"s", q(1, 4)}};
  try {
    family_instantiate(klein2, k);
    FAIL() << "odd b accepted";
  } catch (const ConstraintError& e) {
    EXPECT_NE(std::string(e.what()).find("b = 5 must be even"), std::string::npos) << e.what();
  }
  k["b"] = 4;
  EXPECT_NO_THROW(family_instantiate(klein2, k));
  k["s"] = q(1, 2);
  EXPECT_THROW(family_instantiate(klein2, k), ConstraintError);
  k.erase("s");
  EXPECT_THROW(family_instantiate(klein2, k), ConstraintError);
}

TEST(FamilyInstantiate, HeisenbergTypeOneIdentityLike) {
  const auto& f = *corpus().for_manifold("heis-I").front();
  Env p{{"k", 2}, {"a", 1}, {"b", 0}, {"c", 0}, {"d", 1}, {"u", 0}, {"v", 0}, {"r", 0}, {"s", 0}, {"t", 0}};
  MapCandidate c = family_instantiate(f, p);
  EXPECT_TRUE(c.D.is_identity());
}

TEST(FamilyInstantiate, DomainPredicates) {
  EXPECT_TRUE(in_domain("Z/4-Z/2", q(3, 4)));
  EXPECT_FALSE(in_domain("Z/4-Z/2", q(1, 2)));
  EXPECT_TRUE(in_domain("Z/2-Z", q(-1, 2)));
  EXPECT_FALSE(in_domain("Z/2-Z", 3));
  EXPECT_TRUE(in_domain("int%6=5", -1));
  EXPECT_FALSE(in_domain("int%6=5", 5 + q(1, 2)));
  EXPECT_TRUE(in_domain("2/3+Z", q(-1, 3)));
  EXPECT_FALSE(in_domain("odd", 0));
  EXPECT_TRUE(in_domain("even", -4));
  EXPECT_THROW(in_domain("prime", 2), CorpusError);
}

// Every family, three sampled tuples: the instance validates, so do its
// second and third iterates, and for invertible D the conjugation oracle agrees.
TEST(Corpus, SampledInstancesAreSelfMaps) {
  std::size_t checked = 0, oracle_checked = 0;
  for (const auto& f : corpus().families) {
    auto samples = sample_params(f, 3);
    EXPECT_FALSE(samples.empty()) << f.key();
    for (const auto& env : samples) {
      SCOPED_TRACE(f.key() + " " + env_key(env));
      MapCandidate c = family_instantiate(f, env);
      ++checked;
      EXPECT_TRUE(validate_selfmap(c.power(2)));
      EXPECT_TRUE(validate_selfmap(c.power(3)));
      if (invertible(c.D)) {
        EXPECT_TRUE(conjugation_oracle(c));
        ++oracle_checked;
      }
    }
  }
  EXPECT_GE(checked, 3 * corpus().families.size());
  EXPECT_GT(oracle_checked, 100u);
}

// Perturbed translations and matrices: validator and conjugation oracle agree
// whenever D stays invertible.
TEST(Corpus, ValidatorAgreesWithConjugationOracle) {
  std::size_t valid = 0, invalid = 0;
  const Rational shifts[] = {q(1, 2), q(1, 3), q(1, 4), 1};
  for (const auto& f : corpus().families) {
    for (const auto& env : sample_params(f, 2, 17)) {
      MapCandidate base = family_instantiate(f, env);
      for (std::size_t i = 0; i < base.n(); ++i)
        for (const auto& s : shifts) {
          MapCandidate c = base;
          c.d[i] += s;
          if (invertible(c.D)) {
            bool v = validate_selfmap(c).has_value();
            EXPECT_EQ(v, conjugation_oracle(c)) << f.key() << " " << env_key(env) << " d" << i;
            (v ? valid : invalid)++;
          }
          c = base;
          c.D(i, (i + 1) % c.n()) += s;
          if (c.mf->entry.model == Model::Heisenberg && !heis_endo_check(c.D)) continue;
          if (invertible(c.D)) {
            bool v = validate_selfmap(c).has_value();
            EXPECT_EQ(v, conjugation_oracle(c)) << f.key() << " " << env_key(env) << " D" << i;
            (v ? valid : invalid)++;
          }
        }
    }
  }
  EXPECT_GT(valid, 100u);
  EXPECT_GT(invalid, 100u);
}

// Pushing one constrained parameter out of its domain either breaks the
// defining equation or lands in another family of the same manifold.
TEST(Corpus, PerturbationSoundness) {
  const FamilySpec extra = flat3_3_unlisted();
  std::size_t perturbed = 0, rejected = 0;
  for (const auto& f : corpus().families) {
    for (const auto& env : sample_params(f, 3)) {
      for (const auto& p : f.params) {
        Rational s = violating_shift(p.dom);
        if (s.is_zero() || p.name == "k") continue;
        Env bad = env;
        bad[p.name] += s;
        ASSERT_FALSE(in_domain(p.dom, bad[p.name])) << f.key() << " " << p.name;
        Env full = bad;
        for (const auto& [name, expr] : f.lets) {
          try {
            full[name] = eval_scalar(expr, full);
          } catch (const ExprError&) {
          }
        }
        MapCandidate c;
        try {
          c = family_candidate(f, full);
        } catch (const std::exception&) {
          continue;
        }
        ++perturbed;
        if (!validate_selfmap(c)) {
          ++rejected;
          continue;
        }
        bool covered = belongs_to(extra, c);
        for (const auto* g : corpus().for_manifold(f.manifold)) covered = covered || belongs_to(*g, c);
        EXPECT_TRUE(covered) << f.key() << " with " << p.name << " = " << bad[p.name].str() << ": " << env_key(bad);
      }
    }
  }
  EXPECT_GT(perturbed, 300u);
  EXPECT_GT(rejected, perturbed * 9 / 10);
}

TEST(Corpus, UnlistedFlat33FamilyIsReal) {
  // a = 2, b = 3/2, c = -4, d = 2: alpha -> ((1,-2,-2), I), e2, e3 -> alpha-cosets
  auto c = candidate("flat3-3", QMatrix{{2, q(3, 2), q(3, 2)}, {-4, 2, 2}, {-4, 2, 2}}, {q(-1, 4), -2, 1});
  auto phi = validate_selfmap(c);
  ASSERT_TRUE(phi);
  for (const auto* g : corpus().for_manifold("flat3-3")) EXPECT_FALSE(belongs_to(*g, c)) << g->key();
  EXPECT_TRUE(belongs_to(flat3_3_unlisted(), c));
  c.d[2] = q(1, 2);
  EXPECT_FALSE(validate_selfmap(c));
}

TEST(Sampling, DeterministicAndConstraintRespecting) {
  for (const auto& f : corpus().families) {
    auto a = sample_params(f, 3), b = sample_params(f, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(env_key(a[i]), env_key(b[i]));
      EXPECT_NO_THROW(family_env(f, a[i])) << f.key();
    }
    std::set<std::string> keys;
    for (const auto& e : a) keys.insert(env_key(e));
    EXPECT_EQ(keys.size(), a.size());
  }
}
