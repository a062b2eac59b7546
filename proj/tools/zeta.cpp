// zeta: catalog browsing, Nielsen/Lefschetz computations and the table
// regression run.

#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include <nzeta/nzeta.hpp>

using namespace nzeta;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalidMap = 2, kConstraint = 3, kCorpus = 4 };

std::string corpus_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ZETA_CORPUS")) return env;
  return Corpus::default_path();
}

Env parse_params(const std::vector<std::string>& raw) {
  Env env;
  for (const auto& p : raw) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("parameter '" + p + "' is not of the form name=value");
    env[p.substr(0, eq)] = Rational::parse(p.substr(eq + 1));
  }
  return env;
}

std::vector<Rational> parse_list(const std::string& s) {
  std::vector<Rational> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(Rational::parse(tok));
  return out;
}

// "3,0;0,5"
QMatrix parse_matrix(const std::string& s) {
  std::vector<std::vector<Rational>> rows;
  std::stringstream in(s);
  std::string row;
  while (std::getline(in, row, ';')) rows.push_back(parse_list(row));
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  QMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// Parameters left out default to 0 when 0 lies in their domain, so
// "--param a=3 --param b=5 --param s=1/2" picks a Klein bottle map with r = 0.
Env with_defaults(const FamilySpec& f, Env given) {
  for (const auto& p : f.params)
    if (!given.count(p.name) && in_domain(p.dom, Rational(0))) given[p.name] = Rational(0);
  return given;
}

bool uses_only_known(const FamilySpec& f, const Env& given) {
  for (const auto& [k, v] : given) {
    bool known = false;
    for (const auto& p : f.params) known = known || p.name == k;
    if (!known) return false;
  }
  return true;
}

std::string series_str(const std::vector<BigInt>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x.get_str();
  return s;
}

int cmd_catalog(const std::string& filter, bool as_json, const std::string& corpus_flag) {
  const Catalog& cat = Catalog::builtin();
  std::optional<Corpus> corpus;
  try {
    corpus = Corpus::load(corpus_path(corpus_flag));
  } catch (const CorpusError&) {
  }
  json out = json::array();
  for (const auto& id : cat.ids()) {
    if (!filter.empty() && id.find(filter) == std::string::npos) continue;
    const auto& raw = cat.raw(id);
    json row = {{"id", id},
                {"dim", raw.at("dim")},
                {"model", raw.at("model")},
                {"holonomy_order", raw.at("holonomy_order")},
                {"holonomy_type", raw.value("holonomy_type", "")},
                {"families", corpus ? corpus->for_manifold(id).size() : 0}};
    if (raw.contains("k_constraints")) row["k_constraints"] = raw.at("k_constraints");
    out.push_back(row);
  }
  if (as_json) {
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& r : out) {
    std::cout << r["id"].get<std::string>() << "  dim " << r["dim"] << "  " << r["model"].get<std::string>()
              << "  |F| = " << r["holonomy_order"] << " (" << r["holonomy_type"].get<std::string>() << ")"
              << "  families " << r["families"];
    if (r.contains("k_constraints")) {
      std::string ks;
      for (const auto& c : r["k_constraints"]) ks += (ks.empty() ? "" : ", ") + c.get<std::string>();
      std::cout << "  k: " << ks;
    }
    std::cout << "\n";
  }
  return kOk;
}

struct ComputeArgs {
  std::string manifold;
  std::vector<std::string> params;
  int family = 0;
  std::string matrix, translation, corpus;
  std::size_t kmax = 40;
  bool json = false;
};

int cmd_compute(const ComputeArgs& a) {
  Env given = parse_params(a.params);
  const Catalog& cat = Catalog::builtin();
  cat.raw(a.manifold);  // unknown ids fail here

  MapCandidate cand;
  std::optional<Corpus> corpus;
  const FamilySpec* fam = nullptr;
  Env env;
  if (!a.matrix.empty()) {
    auto mf = manifold(a.manifold, given, cat);
    QMatrix D = parse_matrix(a.matrix);
    QVector d = a.translation.empty() ? QVector(mf->n(), Rational(0)) : parse_list(a.translation);
    cand = MapCandidate{mf, d, D};
    if (!validate_selfmap(cand)) {
      std::cerr << "zeta: (d, D) does not induce a self-map of " << a.manifold << "\n";
      return kInvalidMap;
    }
  } else {
    corpus = Corpus::load(corpus_path(a.corpus));
    auto fams = corpus->for_manifold(a.manifold);
    if (fams.empty()) throw CorpusError("no families recorded for " + a.manifold);
    std::vector<std::string> why;
    for (const auto* f : fams) {
      if (a.family && f->index != a.family) continue;
      if (!a.family && !uses_only_known(*f, given)) continue;
      try {
        env = family_env(*f, with_defaults(*f, given));
        fam = f;
        break;
      } catch (const ConstraintError& e) {
        why.push_back(e.what());
      }
    }
    if (!fam) {
      if (why.empty()) why.push_back(a.family ? "no family " + std::to_string(a.family) : "no family takes these parameter names");
      for (const auto& w : why) std::cerr << "zeta: " << w << "\n";
      return kConstraint;
    }
    cand = family_candidate(*fam, env, cat);
    if (!validate_selfmap(cand)) {
      std::cerr << "zeta: " << fam->key() << " at " << env_str(env) << " is not a self-map\n";
      return kInvalidMap;
    }
  }

  ZetaResult z = compute_zeta(cand);
  PositivePart pp = positive_part(cand);
  AnosovVerdict av = anosov_fastpath(cand, &pp);
  auto L = lefschetz_sequence(cand, a.kmax);
  auto N = nielsen_sequence(cand, a.kmax);
  std::optional<RatFuncProduct> expected;
  if (fam) expected = expected_zeta(*fam, env, z.cell);

  json out = {{"manifold", a.manifold},
              {"D", to_json(cand.D)},
              {"d", json::array()},
              {"p", z.p},
              {"n", z.n},
              {"index", z.index},
              {"cell", z.cell},
              {"anosov", av.holds ? "holds" : "unknown"},
              {"anosov_reason", av.reason},
              {"lefschetz", to_json(L)},
              {"nielsen", to_json(N)},
              {"lefschetz_zeta", to_json(z.lefschetz)},
              {"nielsen_zeta", to_json(z.nielsen_direct)},
              {"nielsen_zeta_structural", to_json(z.nielsen_structural)},
              {"routes_agree", z.routes_agree()}};
  for (const auto& x : cand.d) out["d"].push_back(to_json(x));
  if (z.lefschetz_plus) out["lefschetz_plus_zeta"] = to_json(*z.lefschetz_plus);
  if (fam) {
    out["family"] = fam->key();
    out["params"] = to_json(env);
    out["table_zeta"] = expected ? to_json(*expected) : json(nullptr);
  }

  if (a.json) {
    std::cout << out.dump(2) << "\n";
  } else {
    if (fam) std::cout << "family     " << fam->key() << " (" << env_str(env) << ")\n";
    std::cout << "p, n       " << z.p << ", " << z.n << "\n"
              << "index      " << z.index << "  (cell " << z.cell << ")\n"
              << "anosov     " << (av.holds ? "holds: " : "unknown: ") << av.reason << "\n"
              << "L(f^k)     " << series_str(L) << "\n"
              << "N(f^k)     " << series_str(N) << "\n"
              << "L_f(z)     " << z.lefschetz.str() << "\n";
    if (z.lefschetz_plus) std::cout << "L_f+(z)    " << z.lefschetz_plus->str() << "\n";
    std::cout << "N_f(z)     " << z.nielsen_direct.str() << "\n"
              << "structural " << z.nielsen_structural.str() << (z.routes_agree() ? "" : "  (DISAGREES)") << "\n";
    if (fam) std::cout << "table      " << (expected ? expected->str() : std::string("(no entry)")) << "\n";
  }
  return z.routes_agree() ? kOk : kCorpus;
}

int cmd_verify(const std::string& corpus_flag, std::size_t samples, bool as_json, unsigned jobs) {
  Corpus corpus = Corpus::load(corpus_path(corpus_flag));
  if (samples == 0) std::cerr << "zeta: warning: --samples 0 checks nothing\n";
  const Catalog& cat = Catalog::builtin();

  // one task per family; results are gathered in corpus order
  std::vector<std::vector<InstanceReport>> results(corpus.families.size());
  std::vector<std::size_t> counts(corpus.families.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < corpus.families.size();) {
      const auto& f = corpus.families[i];
      auto tuples = sample_params(f, samples);
      counts[i] = tuples.size();
      for (const auto& env : tuples) results[i].push_back(verify_instance(f, env, cat));
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.push_back(std::async(std::launch::async, worker));
  for (auto& p : pool) p.get();

  VerifySummary s;
  json fails = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    ++s.families;
    if (counts[i] == 0 && samples > 0) {
      ++s.empty_families;
      std::cerr << "zeta: warning: no admissible sample for " << corpus.families[i].key() << "\n";
    }
    for (auto& r : results[i]) {
      ++s.instances;
      if (r.ok) {
        ++s.passed;
      } else {
        fails.push_back(to_json(r));
        s.failures.push_back(std::move(r));
      }
    }
  }

  if (as_json) {
    std::cout << json{{"families", s.families},
                      {"instances", s.instances},
                      {"passed", s.passed},
                      {"empty_families", s.empty_families},
                      {"failures", fails}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << s.families << " families, " << s.instances << " instances, " << s.passed << " passed, "
              << s.failures.size() << " failed\n";
    for (const auto& r : s.failures) {
      std::cout << "FAIL " << r.family << " [" << env_str(r.params) << "] cell " << r.cell << "\n";
      for (const auto& p : r.problems) std::cout << "  " << p << "\n";
      if (!r.expected.empty()) std::cout << "  table:    " << r.expected << "\n";
      if (!r.direct.empty()) std::cout << "  computed: " << r.direct << "\n";
    }
  }
  return s.ok() && s.empty_families == 0 ? kOk : kCorpus;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nielsen and Lefschetz zeta functions of maps on infra-nilmanifolds of dimension at most 3"};
  app.require_subcommand(1);

  std::string filter, corpus_flag;
  bool as_json = false;
  auto* cat = app.add_subcommand("catalog", "list the manifolds in the catalog");
  cat->add_option("--filter", filter, "substring of the id");
  cat->add_option("--corpus", corpus_flag, "family corpus used for the counts");
  cat->add_flag("--json", as_json);

  ComputeArgs ca;
  auto* comp = app.add_subcommand("compute", "numbers and zeta functions of one map");
  comp->add_option("--manifold", ca.manifold, "catalog id")->required();
  comp->add_option("--param", ca.params, "name=value, exact rationals such as 3, 1/2, -7/4");
  comp->add_option("--family", ca.family, "family index for the manifold (default: first that fits)");
  comp->add_option("--matrix", ca.matrix, "linear part, rows separated by ';', e.g. 3,0;0,5");
  comp->add_option("--translation", ca.translation, "translation part, e.g. 0,1/2");
  comp->add_option("--kmax", ca.kmax, "number of iterates")->check(CLI::Range(1, 200));
  comp->add_option("--corpus", ca.corpus, "family corpus");
  comp->add_flag("--json", ca.json);

  std::size_t samples = 3;
  unsigned jobs = 0;
  auto* ver = app.add_subcommand("verify-tables", "check every family of the corpus on sampled parameters");
  ver->add_option("--corpus", corpus_flag, "family corpus (default: $ZETA_CORPUS or the bundled file)");
  ver->add_option("--samples", samples, "parameter tuples per family");
  ver->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  ver->add_flag("--json", as_json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cat) return cmd_catalog(filter, as_json, corpus_flag);
    if (*comp) return cmd_compute(ca);
    if (*ver) return cmd_verify(corpus_flag, samples, as_json, jobs);
  } catch (const ConstraintError& e) {
    std::cerr << "zeta: " << e.what() << "\n";
    return kConstraint;
  } catch (const std::invalid_argument& e) {
    std::cerr << "zeta: " << e.what() << "\n";
    return kInvalidMap;
  } catch (const CorpusError& e) {
    std::cerr << "zeta: " << e.what() << "\n";
    return kCorpus;
  } catch (const CatalogError& e) {
    std::cerr << "zeta: " << e.what() << "\n";
    return kConstraint;
  } catch (const std::exception& e) {
    std::cerr << "zeta: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
