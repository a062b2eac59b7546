#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zeta.hpp"

namespace nzeta {

/// The table zeta for the given cell, or nullopt when the table has no
/// entry there.
inline std::optional<RatFuncProduct> expected_zeta(const FamilySpec& spec, const Env& env, const std::string& cell) {
  for (const auto& zc : spec.zeta) {
    if (!zc.when.empty() && !eval_bool(zc.when, env)) continue;
    auto it = zc.cells.find(cell);
    if (it == zc.cells.end()) it = zc.cells.find("any");
    if (it == zc.cells.end()) return std::nullopt;
    QPoly num = QPoly::constant(1), den = QPoly::constant(1);
    for (const auto& s : it->second.num) num = num * eval_poly(s, env);
    for (const auto& s : it->second.den) den = den * eval_poly(s, env);
    return RatFuncProduct::from_ratfn(num, den);
  }
  return std::nullopt;
}

struct InstanceReport {
  std::string family;
  Env params;
  bool ok = true;
  std::string cell;
  std::string expected, direct, structural;
  std::vector<std::string> problems;
};

inline std::string env_str(const Env& env) {
  std::string s;
  for (const auto& [k, v] : env) s += (s.empty() ? "" : " ") + k + "=" + v.str();
  return s;
}

inline constexpr std::size_t kSeriesChecks = 40;

/// Instantiate, compute both routes, compare with the table, check
/// the series against N(f^k) and the sign relations.
inline InstanceReport verify_instance(const FamilySpec& spec, const Env& params, const Catalog& cat = Catalog::builtin()) {
  InstanceReport r;
  r.family = spec.key();
  r.params = params;
  auto fail = [&](const std::string& why) {
    r.ok = false;
    r.problems.push_back(why);
  };
  try {
    Env env = family_env(spec, params);
    MapCandidate c = family_instantiate(spec, params, cat);
    ZetaResult z = compute_zeta(c);
    r.cell = z.cell;
    r.direct = z.nielsen_direct.str();
    r.structural = z.nielsen_structural.str();
    if (!z.routes_agree()) fail("direct and structural routes disagree");
    auto want = expected_zeta(spec, env, z.cell);
    if (!want) {
      fail("the table has no entry for cell " + z.cell);
    } else {
      r.expected = want->str();
      if (!(*want == z.nielsen_direct)) fail("Nielsen zeta differs from the table");
    }
    auto N = nielsen_sequence(c, kSeriesChecks);
    auto lg = z.nielsen_direct.log_derivative(kSeriesChecks);
    for (std::size_t k = 0; k < kSeriesChecks; ++k)
      if (!(lg[k] == Rational(N[k]))) {
        fail("series disagrees with N(f^k) at k = " + std::to_string(k + 1));
        break;
      }
    auto sr = check_sign_relations(c);
    if (!sr.ok) fail("sign relation: " + sr.detail);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return r;
}

struct VerifySummary {
  std::size_t families = 0;
  std::size_t instances = 0;
  std::size_t passed = 0;
  std::size_t empty_families = 0;
  std::vector<InstanceReport> failures;
  bool ok() const { return failures.empty(); }
};

inline VerifySummary verify_tables(const Corpus& corpus, std::size_t samples, const Catalog& cat = Catalog::builtin()) {
  VerifySummary s;
  for (const auto& f : corpus.families) {
    ++s.families;
    auto tuples = sample_params(f, samples);
    if (tuples.empty() && samples > 0) ++s.empty_families;
    for (const auto& env : tuples) {
      ++s.instances;
      auto r = verify_instance(f, env, cat);
      if (r.ok)
        ++s.passed;
      else
        s.failures.push_back(std::move(r));
    }
  }
  return s;
}

}  // namespace nzeta
