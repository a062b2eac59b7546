#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "verify.hpp"

namespace nzeta {

/// Integers that fit in 64 bits are JSON numbers, larger ones decimal strings.
inline nlohmann::json to_json(const BigInt& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

inline BigInt bigint_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return BigInt(j.get<long>());
  if (j.is_string()) return BigInt(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

inline nlohmann::json to_json(const Rational& r) {
  if (r.is_integer()) return to_json(r.num());
  return r.str();
}

/// [{"poly": [1, -5], "exp": 1}, ...] with ascending coefficients.
inline nlohmann::json to_json(const RatFuncProduct& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : p.factors()) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : f.q.coeffs()) coeffs.push_back(to_json(c));
    out.push_back({{"poly", coeffs}, {"exp", f.e}});
  }
  return out;
}

inline RatFuncProduct rfp_from_json(const nlohmann::json& j) {
  std::vector<RfpFactor> fs;
  for (const auto& f : j) {
    std::vector<BigInt> c;
    for (const auto& x : f.at("poly")) c.push_back(bigint_from_json(x));
    fs.push_back({IntPoly(std::move(c)), f.at("exp").get<long>()});
  }
  return RatFuncProduct(std::move(fs));
}

inline nlohmann::json to_json(const QMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(row);
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<BigInt>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(to_json(x));
  return out;
}

inline nlohmann::json to_json(const Env& env) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : env) out[k] = v.str();
  return out;
}

inline nlohmann::json to_json(const InstanceReport& r) {
  return {{"family", r.family}, {"params", to_json(r.params)}, {"ok", r.ok},           {"cell", r.cell},
          {"expected", r.expected}, {"direct", r.direct},       {"structural", r.structural}, {"problems", r.problems}};
}

}  // namespace nzeta
