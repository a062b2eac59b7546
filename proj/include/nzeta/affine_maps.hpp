#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"

namespace nzeta {

/// A catalog entry together with its holonomy group.
struct Manifold {
  CatalogEntry entry;
  HolonomyGroup hol;

  std::size_t n() const { return static_cast<std::size_t>(entry.dim); }
};

inline std::shared_ptr<const Manifold> make_manifold(CatalogEntry entry) {
  auto m = std::make_shared<Manifold>();
  m->hol = holonomy(entry);
  m->entry = std::move(entry);
  return m;
}

/// Memoized lookup; Heisenberg entries are keyed by k as well.
inline std::shared_ptr<const Manifold> manifold(const std::string& id, const Env& params = {},
                                               const Catalog& cat = Catalog::builtin()) {
  static std::mutex mu;
  static std::map<std::pair<const Catalog*, std::string>, std::shared_ptr<const Manifold>> cache;
  std::string key = id;
  if (cat.is_heisenberg(id)) {
    auto it = params.find("k");
    key += "|" + (it == params.end() ? std::string("?") : it->second.str());
  }
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{&cat, key}];
  if (!slot) slot = make_manifold(cat.lookup(id, params));
  return slot;
}

/// An affine map (d, D): abelian translation vector, or h(r, s, t) for the
/// Heisenberg model, with linear part D* on the Lie algebra.
struct MapCandidate {
  std::shared_ptr<const Manifold> mf;
  QVector d;
  QMatrix D;

  std::size_t n() const { return mf->n(); }

  AffineElement embed() const {
    const auto& e = mf->entry;
    if (e.model == Model::Abelian) return AffineElement::abelian(D, d);
    return AffineElement::heisenberg(e.k, d[0], d[1], d[2], D);
  }

  /// (d, D)^j, again as a candidate.
  MapCandidate power(unsigned j) const {
    AffineElement x = embed();
    AffineElement acc = lattice_element(mf->entry.model, mf->entry.k, QVector(n(), Rational(0)));
    for (unsigned i = 0; i < j; ++i) acc = acc * x;
    MapCandidate out{mf, {}, {}};
    if (mf->entry.model == Model::Abelian) {
      out.D = acc.m.block(0, 0, n(), n());
      out.d = QVector(n());
      for (std::size_t i = 0; i < n(); ++i) out.d[i] = acc.m(i, n());
    } else {
      auto p = psi_preimage(mf->entry.k, acc.m);
      out.D = p.phi;
      out.d = {p.x, p.y, p.z};
    }
    return out;
  }
};

/// phi(gamma) = lambda * rep(B) for each generator gamma.
struct PhiAssignment {
  struct Item {
    std::string generator;
    std::size_t holonomy_index;
    QVector lattice;
  };
  std::vector<Item> items;
};

inline void check_candidate_shape(const MapCandidate& c) {
  const std::size_t n = c.n();
  if (c.D.rows() != n || c.D.cols() != n) throw std::invalid_argument("candidate: D must be " + std::to_string(n) + "x" + std::to_string(n));
  if (c.d.size() != n) throw std::invalid_argument("candidate: translation must have length " + std::to_string(n));
  if (c.mf->entry.model == Model::Heisenberg && !heis_endo_check(c.D))
    throw std::invalid_argument("candidate: D* is not an endomorphism of the Heisenberg algebra");
}

/// Solves lhs = T(lambda) * r for a lattice element lambda, if one exists.
inline std::optional<QVector> lattice_quotient(const Manifold& mf, const AffineElement& lhs, const AffineElement& r) {
  const std::size_t n = mf.n();
  const auto& e = mf.entry;
  QVector z(n);
  if (e.model == Model::Abelian) {
    for (std::size_t i = 0; i < n; ++i) z[i] = lhs.m(i, n) - r.m(i, n);
  } else {
    z[0] = lhs.m(1, 3) - r.m(1, 3);
    z[1] = lhs.m(2, 3) - r.m(2, 3);
    z[2] = 0;
    QMatrix partial = lattice_element(e.model, e.k, z).m * r.m;
    z[2] = lhs.m(0, 3) - partial(0, 3);
  }
  for (const auto& v : z)
    if (!v.is_integer()) return std::nullopt;
  if (!(lattice_element(e.model, e.k, z).m * r.m == lhs.m)) return std::nullopt;
  return z;
}

/// Tests (d,D) gamma = phi(gamma) (d,D) for every generator; holonomy
/// elements are tried in catalog order and the first match is kept.
inline std::optional<PhiAssignment> validate_selfmap(const MapCandidate& c) {
  check_candidate_shape(c);
  const Manifold& mf = *c.mf;
  AffineElement x = c.embed();
  PhiAssignment out;
  for (const auto& g : mf.entry.generators) {
    AffineElement lhs = x * g.elem;
    QMatrix da = c.D * g.elem.rot();
    bool found = false;
    for (std::size_t b = 0; b < mf.hol.order() && !found; ++b) {
      if (!(da == mf.hol.elements[b] * c.D)) continue;
      if (auto lam = lattice_quotient(mf, lhs, mf.hol.representatives[b] * x)) {
        out.items.push_back({g.name, b, *lam});
        found = true;
      }
    }
    if (!found) return std::nullopt;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parametrized families.

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParamSpec {
  std::string name;
  std::string dom;  // real | int | odd | even | int%m=r | Z/q | Z/q-Z/p | c+Z
};

namespace detail {

inline std::pair<std::string, std::string> split_once(const std::string& s, char ch) {
  auto p = s.find(ch);
  if (p == std::string::npos) return {s, ""};
  return {s.substr(0, p), s.substr(p + 1)};
}

inline bool times_is_int(const Rational& v, const std::string& q) {
  return (v * Rational::parse(q)).is_integer();
}

}  // namespace detail

/// Membership of v in the named domain.
inline bool in_domain(const std::string& dom, const Rational& v) {
  if (dom == "real") return true;
  if (dom == "int") return v.is_integer();
  if (dom == "odd" || dom == "even") {
    if (!v.is_integer()) return false;
    bool odd = BigInt(v.num() % 2) != 0;
    return dom == "odd" ? odd : !odd;
  }
  if (dom.rfind("int%", 0) == 0) {
    auto [m, r] = detail::split_once(dom.substr(4), '=');
    if (!v.is_integer()) return false;
    Rational mm = Rational::parse(m);
    Rational q = v - mm * Rational((v / mm).floor());
    return q == Rational::parse(r);
  }
  if (dom.rfind("Z/", 0) == 0) {
    auto [q, rest] = detail::split_once(dom.substr(2), '-');
    if (!detail::times_is_int(v, q)) return false;
    if (rest.empty()) return true;
    if (rest == "Z") return !v.is_integer();
    if (rest.rfind("Z/", 0) != 0) throw CorpusError("bad domain " + dom);
    return !detail::times_is_int(v, rest.substr(2));
  }
  if (dom.size() > 2 && dom.substr(dom.size() - 2) == "+Z") return (v - Rational::parse(dom.substr(0, dom.size() - 2))).is_integer();
  throw CorpusError("unknown domain " + dom);
}

inline std::string describe_domain(const std::string& dom) {
  if (dom == "real") return "a real number";
  if (dom == "int") return "an integer";
  if (dom == "odd") return "odd";
  if (dom == "even") return "even";
  if (dom.rfind("int%", 0) == 0) {
    auto [m, r] = detail::split_once(dom.substr(4), '=');
    return "an integer congruent to " + r + " mod " + m;
  }
  if (dom.rfind("Z/", 0) == 0) {
    auto [q, rest] = detail::split_once(dom.substr(2), '-');
    std::string s = "in (1/" + q + ")Z";
    if (rest == "Z") s += " but not in Z";
    else if (!rest.empty()) s += " but not in (1/" + rest.substr(2) + ")Z";
    return s;
  }
  return "in " + dom;
}

/// Named zeta cells: key "i1" / "i2", then p parity and n parity (e = even).
struct ZetaCell {
  std::vector<std::string> num, den;
};
struct ZetaCase {
  std::string when;  // empty = always
  std::map<std::string, ZetaCell> cells;  // "i1.ee", ..., or "any"
};

struct FamilySpec {
  std::string manifold;
  int index = 0;
  std::string table;  // which zeta table the expected values come from
  std::vector<ParamSpec> params;
  std::vector<std::pair<std::string, std::string>> lets;
  std::vector<std::string> when;
  std::vector<std::vector<std::string>> D;
  std::vector<std::string> d;
  std::vector<ZetaCase> zeta;

  std::string key() const { return manifold + "#" + std::to_string(index); }
};

inline FamilySpec parse_family(const nlohmann::json& j) {
  FamilySpec f;
  f.manifold = j.at("manifold").get<std::string>();
  f.index = j.at("index").get<int>();
  f.table = j.value("table", "");
  for (const auto& p : j.at("params")) f.params.push_back({p.at(0).get<std::string>(), p.at(1).get<std::string>()});
  for (const auto& l : j.value("lets", nlohmann::json::array())) f.lets.emplace_back(l.at(0).get<std::string>(), l.at(1).get<std::string>());
  for (const auto& w : j.value("when", nlohmann::json::array())) f.when.push_back(w.get<std::string>());
  for (const auto& row : j.at("D")) f.D.push_back(row.get<std::vector<std::string>>());
  f.d = j.at("d").get<std::vector<std::string>>();
  auto cell = [](const nlohmann::json& c) {
    ZetaCell z;
    z.num = c.value("num", std::vector<std::string>{});
    z.den = c.value("den", std::vector<std::string>{});
    return z;
  };
  auto read_case = [&](const nlohmann::json& c) {
    ZetaCase zc;
    zc.when = c.value("when", "");
    for (auto it = c.begin(); it != c.end(); ++it) {
      if (it.key() == "when") continue;
      if (it.key() == "any") {
        zc.cells["any"] = cell(it.value());
        continue;
      }
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) zc.cells[it.key() + "." + jt.key()] = cell(jt.value());
    }
    return zc;
  };
  const auto& z = j.at("zeta");
  if (z.is_array())
    for (const auto& c : z) f.zeta.push_back(read_case(c));
  else
    f.zeta.push_back(read_case(z));
  return f;
}

struct Corpus {
  std::vector<FamilySpec> families;

  static std::string default_path() { return std::string(NZETA_DATA_DIR) + "/families.json"; }

  static Corpus load(const std::string& path = default_path()) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus " + path);
    Corpus c;
    try {
      auto doc = nlohmann::json::parse(in);
      for (const auto& f : doc.at("families")) c.families.push_back(parse_family(f));
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError("corpus " + path + ": " + e.what());
    }
    return c;
  }

  std::vector<const FamilySpec*> for_manifold(const std::string& id) const {
    std::vector<const FamilySpec*> out;
    for (const auto& f : families)
      if (f.manifold == id) out.push_back(&f);
    return out;
  }
};

/// Checks domains and side conditions; returns params extended by the lets.
inline Env family_env(const FamilySpec& spec, const Env& params) {
  Env env;
  for (const auto& p : spec.params) {
    auto it = params.find(p.name);
    if (it == params.end()) throw ConstraintError(spec.key() + ": missing parameter " + p.name);
    if (!in_domain(p.dom, it->second))
      throw ConstraintError(spec.key() + ": " + p.name + " = " + it->second.str() + " must be " + describe_domain(p.dom));
    env[p.name] = it->second;
  }
  // a let that cannot be evaluated (lone() with no lone value, say) stays
  // unbound; only table cells that mention it fail
  for (const auto& [name, expr] : spec.lets) {
    try {
      env[name] = eval_scalar(expr, env);
    } catch (const ExprError&) {
    }
  }
  for (const auto& w : spec.when)
    if (!eval_bool(w, env)) throw ConstraintError(spec.key() + ": condition violated: " + w);
  return env;
}

/// Builds the candidate without validating it.
inline MapCandidate family_candidate(const FamilySpec& spec, const Env& env, const Catalog& cat = Catalog::builtin()) {
  MapCandidate c{manifold(spec.manifold, env, cat), {}, {}};
  const std::size_t n = c.n();
  if (spec.D.size() != n || spec.d.size() != n) throw CorpusError(spec.key() + ": template has the wrong size");
  c.D = QMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.D[i].size() != n) throw CorpusError(spec.key() + ": ragged matrix template");
    for (std::size_t j = 0; j < n; ++j) c.D(i, j) = eval_scalar(spec.D[i][j], env);
  }
  c.d = QVector(n);
  for (std::size_t i = 0; i < n; ++i) c.d[i] = eval_scalar(spec.d[i], env);
  return c;
}

/// Instantiates and validates; an instance that is not a self-map is a
/// corpus bug and raises CorpusError.
inline MapCandidate family_instantiate(const FamilySpec& spec, const Env& params, const Catalog& cat = Catalog::builtin()) {
  Env env = family_env(spec, params);
  MapCandidate c = family_candidate(spec, env, cat);
  if (!validate_selfmap(c)) throw CorpusError(spec.key() + ": instance is not a self-map");
  return c;
}

// ---------------------------------------------------------------------------
// Deterministic sampling.

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Grid -5..5 within the domain plus two larger values from the seeded stream.
inline std::vector<Rational> domain_values(const std::string& dom, std::mt19937_64& rng) {
  std::vector<Rational> out;
  if (dom == "real") {
    // quarter steps so that side conditions like s - t in Z/2 are reachable
    for (int p = -8; p <= 8; ++p) out.push_back(Rational(p) / Rational(4));
    std::uniform_int_distribution<int> num(-9, 9), den(2, 7);
    for (int i = 0; i < 4; ++i) out.push_back(Rational(num(rng)) / Rational(den(rng)));
    return out;
  }
  Rational step = 1;
  Rational offset = 0;
  if (dom.rfind("Z/", 0) == 0) step = Rational(1) / Rational::parse(detail::split_once(dom.substr(2), '-').first);
  if (dom.size() > 2 && dom.substr(dom.size() - 2) == "+Z") offset = Rational::parse(dom.substr(0, dom.size() - 2));
  for (int j = -5; j <= 5; ++j) {
    Rational v = offset + step * Rational(j);
    if (in_domain(dom, v)) out.push_back(v);
  }
  std::uniform_int_distribution<int> big(6, 30), sign(0, 1);
  for (int found = 0, tries = 0; found < 2 && tries < 200; ++tries) {
    Rational v = offset + step * Rational(sign(rng) ? big(rng) : -big(rng));
    if (in_domain(dom, v)) {
      out.push_back(v);
      ++found;
    }
  }
  return out;
}

inline std::string env_key(const Env& env) {
  std::string s;
  for (const auto& [k, v] : env) s += k + "=" + v.str() + ";";
  return s;
}

/// Up to count parameter tuples satisfying every constraint.
inline std::vector<Env> sample_params(const FamilySpec& spec, std::size_t count, std::uint64_t salt = 0) {
  std::mt19937_64 rng(fnv1a(spec.key()) ^ salt);
  std::vector<std::vector<Rational>> values;
  for (const auto& p : spec.params) values.push_back(domain_values(p.dom, rng));
  std::vector<Env> out;
  std::set<std::string> seen;
  for (int tries = 0; out.size() < count && tries < 5000; ++tries) {
    Env env;
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      std::uniform_int_distribution<std::size_t> pick(0, values[i].size() - 1);
      env[spec.params[i].name] = values[i][pick(rng)];
    }
    try {
      // the catalog's own conditions on k count too
      manifold(spec.manifold, family_env(spec, env));
    } catch (const ConstraintError&) {
      continue;
    }
    if (seen.insert(env_key(env)).second) out.push_back(env);
  }
  return out;
}

}  // namespace nzeta
