#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "expr.hpp"
#include "matrix.hpp"

#ifndef NZETA_DATA_DIR
#define NZETA_DATA_DIR "data"
#endif

namespace nzeta {

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when parameters break an entry's or a family's constraints.
class ConstraintError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Model { Abelian, Heisenberg };

inline std::string model_name(Model m) { return m == Model::Abelian ? "abelian" : "heisenberg"; }

/// psi(h(x,y,z), phi) for the Heisenberg group with structure constant k.
inline QMatrix psi_embed(const Rational& k, const Rational& x, const Rational& y, const Rational& z,
                         const QMatrix& phi) {
  if (phi.rows() != 3 || phi.cols() != 3) throw AlgebraError("psi_embed: phi must be 3x3");
  QMatrix t = QMatrix::identity(4);
  Rational half = Rational(1) / Rational(2);
  t(0, 1) = k * y * half;
  t(0, 2) = -k * x * half;
  t(0, 3) = -k * x * y * half + z;
  t(1, 3) = x;
  t(2, 3) = y;
  QMatrix m = QMatrix::identity(4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = phi(i, j);
  return t * m;
}

/// Column one of a Lie algebra endomorphism of the Heisenberg algebra in the
/// basis {log c, log a, log b} is (det of the lower 2x2 block, 0, 0).
inline bool heis_endo_check(const QMatrix& d) {
  if (d.rows() != 3 || d.cols() != 3) return false;
  return d(1, 0).is_zero() && d(2, 0).is_zero() && d(0, 0) == d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1);
}

struct HeisPreimage {
  Rational x, y, z;
  QMatrix phi;
};

inline HeisPreimage psi_preimage(const Rational& k, const QMatrix& m) {
  Rational half = Rational(1) / Rational(2);
  HeisPreimage p{m(1, 3), m(2, 3), 0, QMatrix(3, 3)};
  p.z = m(0, 3) + k * p.x * p.y * half;
  QMatrix tinv = QMatrix::identity(3);
  tinv(0, 1) = -k * p.y * half;
  tinv(0, 2) = k * p.x * half;
  p.phi = tinv * m.block(0, 0, 3, 3);
  return p;
}

/// An element of Aff(R^n) as an (n+1)x(n+1) matrix, or of H x| Endo(H) as its
/// 4x4 psi image.
struct AffineElement {
  Model model = Model::Abelian;
  Rational k;  // Heisenberg structure constant, unused for the abelian model
  QMatrix m;

  std::size_t n() const { return m.rows() - 1; }

  static AffineElement abelian(const QMatrix& rot, const QVector& trans) {
    const std::size_t n = rot.rows();
    AffineElement e{Model::Abelian, 0, QMatrix::identity(n + 1)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) e.m(i, j) = rot(i, j);
      e.m(i, n) = trans[i];
    }
    return e;
  }
  static AffineElement heisenberg(const Rational& k, const Rational& x, const Rational& y, const Rational& z,
                                  const QMatrix& phi) {
    return {Model::Heisenberg, k, psi_embed(k, x, y, z, phi)};
  }

  /// The linear part on the Lie algebra.
  QMatrix rot() const {
    if (model == Model::Abelian) return m.block(0, 0, n(), n());
    return psi_preimage(k, m).phi;
  }
  /// Abelian translation vector, or the Heisenberg coordinates (x, y, z).
  QVector trans() const {
    if (model == Model::Abelian) {
      QVector t(n());
      for (std::size_t i = 0; i < n(); ++i) t[i] = m(i, n());
      return t;
    }
    auto p = psi_preimage(k, m);
    return {p.x, p.y, p.z};
  }

  bool well_formed() const {
    for (std::size_t j = 0; j < n(); ++j)
      if (!m(n(), j).is_zero()) return false;
    if (!(m(n(), n()) == 1)) return false;
    if (model == Model::Heisenberg) {
      auto p = psi_preimage(k, m);
      return heis_endo_check(p.phi) && psi_embed(k, p.x, p.y, p.z, p.phi) == m;
    }
    return true;
  }

  AffineElement inverse() const { return {model, k, nzeta::inverse(m)}; }
  friend AffineElement operator*(const AffineElement& a, const AffineElement& b) { return {a.model, a.k, a.m * b.m}; }
  friend bool operator==(const AffineElement& a, const AffineElement& b) { return a.m == b.m; }
};

/// Identity rotation and integral translation (abelian), or psi-preimage
/// h(z1, z2, z3) with integral coordinates and trivial automorphism.
inline bool lattice_member(const AffineElement& e) {
  if (!e.rot().is_identity()) return false;
  for (const auto& t : e.trans())
    if (!t.is_integer()) return false;
  return true;
}

/// The lattice element with coordinates z (abelian translation, or h(z)).
inline AffineElement lattice_element(Model model, const Rational& k, const QVector& z) {
  if (model == Model::Abelian) return AffineElement::abelian(QMatrix::identity(z.size()), z);
  return AffineElement::heisenberg(k, z[0], z[1], z[2], QMatrix::identity(3));
}

struct HolonomyGroup {
  std::vector<QMatrix> elements;            // identity first, then closure order
  std::vector<AffineElement> representatives;  // a group element over each holonomy element
  std::vector<std::vector<std::size_t>> table;  // table[i][j] = index of elements[i] * elements[j]
  std::vector<std::size_t> generators;

  std::size_t order() const { return elements.size(); }
  std::size_t index_of(const QMatrix& a) const {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i] == a) return i;
    return elements.size();
  }
};

struct Generator {
  std::string name;
  AffineElement elem;
};

struct CatalogEntry {
  std::string id;
  int dim = 0;
  Model model = Model::Abelian;
  Rational k;
  std::vector<Generator> generators;
  std::size_t holonomy_order = 0;
  std::string holonomy_type;
  std::vector<std::string> relators;
  std::string notes;

  const AffineElement& generator(const std::string& name) const {
    for (const auto& g : generators)
      if (g.name == name) return g.elem;
    throw CatalogError(id + ": no generator named " + name);
  }
};

inline constexpr std::size_t kHolonomyCap = 48;

inline HolonomyGroup holonomy(const CatalogEntry& entry) {
  HolonomyGroup h;
  const std::size_t n = static_cast<std::size_t>(entry.dim);
  AffineElement id = lattice_element(entry.model, entry.k, QVector(n, Rational(0)));
  h.elements.push_back(QMatrix::identity(n));
  h.representatives.push_back(id);
  std::vector<AffineElement> gens;
  for (const auto& g : entry.generators) {
    QMatrix r = g.elem.rot();
    if (r.is_identity()) continue;
    gens.push_back(g.elem);
  }
  for (std::size_t head = 0; head < h.elements.size(); ++head) {
    for (const auto& g : gens) {
      AffineElement prod = h.representatives[head] * g;
      QMatrix r = prod.rot();
      if (h.index_of(r) == h.elements.size()) {
        if (h.elements.size() >= kHolonomyCap) throw CatalogError(entry.id + ": holonomy closure exceeds cap");
        h.elements.push_back(r);
        h.representatives.push_back(prod);
      }
    }
  }
  for (const auto& g : gens) h.generators.push_back(h.index_of(g.rot()));
  const std::size_t m = h.elements.size();
  h.table.assign(m, std::vector<std::size_t>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t p = h.index_of(h.elements[i] * h.elements[j]);
      if (p == m) throw CatalogError(entry.id + ": holonomy not closed");
      h.table[i][j] = p;
    }
  return h;
}

/// Evaluates a word such as "alpha^2 b^-1 [b,a] c^k" in the generators.
inline AffineElement eval_word(const CatalogEntry& entry, const std::string& word) {
  const std::size_t n = static_cast<std::size_t>(entry.dim);
  AffineElement acc = lattice_element(entry.model, entry.k, QVector(n, Rational(0)));
  Env env{{"k", entry.k}};
  auto power = [&](const AffineElement& g, const std::string& exp) {
    long e = exp.empty() ? 1 : [&] {
      Rational r = eval_scalar(exp, env);
      if (!r.is_integer()) throw CatalogError("non-integer exponent in word " + word);
      return *r.to_long();
    }();
    AffineElement base = e < 0 ? g.inverse() : g;
    AffineElement out = lattice_element(entry.model, entry.k, QVector(n, Rational(0)));
    for (long i = 0; i < (e < 0 ? -e : e); ++i) out = out * base;
    return out;
  };
  std::istringstream in(word);
  std::string tok;
  while (in >> tok) {
    std::string exp;
    auto caret = tok.rfind('^');
    if (caret != std::string::npos) {
      exp = tok.substr(caret + 1);
      tok = tok.substr(0, caret);
    }
    AffineElement g = acc;
    if (tok == "e" || tok == "1") {
      continue;
    } else if (tok.size() > 2 && tok.front() == '[' && tok.back() == ']') {
      auto comma = tok.find(',');
      if (comma == std::string::npos) throw CatalogError("bad commutator " + tok);
      const auto& x = entry.generator(tok.substr(1, comma - 1));
      const auto& y = entry.generator(tok.substr(comma + 1, tok.size() - comma - 2));
      // [x,y] = x y x^-1 y^-1
      g = x * y * x.inverse() * y.inverse();
    } else {
      g = entry.generator(tok);
    }
    acc = acc * power(g, exp);
  }
  return acc;
}

/// Relators of the form "lhs = rhs"; returns the first that fails, if any.
inline std::optional<std::string> check_relators(const CatalogEntry& entry) {
  for (const auto& rel : entry.relators) {
    auto eq = rel.find('=');
    if (eq == std::string::npos) throw CatalogError("relator without '=': " + rel);
    if (!(eval_word(entry, rel.substr(0, eq)) == eval_word(entry, rel.substr(eq + 1)))) return rel;
  }
  return std::nullopt;
}

namespace detail {

inline Rational json_rational(const nlohmann::json& v, const Env& env) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_string()) return eval_scalar(v.get<std::string>(), env);
  throw CatalogError("expected a rational string, got " + v.dump());
}

inline QMatrix json_matrix(const nlohmann::json& v, std::size_t n, const Env& env) {
  if (v.is_string() && v.get<std::string>() == "I") return QMatrix::identity(n);
  QMatrix m(n, n);
  if (!v.is_array() || v.size() != n) throw CatalogError("expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i].size() != n) throw CatalogError("ragged matrix row");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = json_rational(v[i][j], env);
  }
  return m;
}

inline QVector json_vector(const nlohmann::json& v, std::size_t n, const Env& env) {
  if (!v.is_array() || v.size() != n) throw CatalogError("expected a vector of length " + std::to_string(n));
  QVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = json_rational(v[i], env);
  return out;
}

}  // namespace detail

/// Raw catalog file; entries are instantiated on lookup.
class Catalog {
 public:
  static std::string default_path() { return std::string(NZETA_DATA_DIR) + "/catalog.json"; }

  static Catalog load(const std::string& path = default_path()) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog " + path);
    Catalog c;
    try {
      c.doc_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw CatalogError("catalog " + path + ": " + e.what());
    }
    for (const auto& e : c.doc_.at("entries")) c.ids_.push_back(e.at("id").get<std::string>());
    return c;
  }

  static const Catalog& builtin() {
    static const Catalog c = load();
    return c;
  }

  const std::vector<std::string>& ids() const { return ids_; }

  const nlohmann::json& raw(const std::string& id) const {
    for (const auto& e : doc_.at("entries"))
      if (e.at("id") == id) return e;
    throw CatalogError("unknown manifold id: " + id);
  }

  bool is_heisenberg(const std::string& id) const { return raw(id).at("model") == "heisenberg"; }

  /// Instantiates an entry; Heisenberg entries need k in params.
  CatalogEntry lookup(const std::string& id, const Env& params = {}) const {
    const auto& e = raw(id);
    CatalogEntry out;
    out.id = id;
    out.dim = e.at("dim").get<int>();
    out.model = e.at("model") == "heisenberg" ? Model::Heisenberg : Model::Abelian;
    out.holonomy_order = e.at("holonomy_order").get<std::size_t>();
    out.holonomy_type = e.value("holonomy_type", "");
    out.notes = e.value("notes", "");
    for (const auto& r : e.value("relators", nlohmann::json::array())) out.relators.push_back(r.get<std::string>());
    Env env;
    if (out.model == Model::Heisenberg) {
      auto it = params.find("k");
      if (it == params.end()) throw ConstraintError(id + ": parameter k is required");
      out.k = it->second;
      env["k"] = out.k;
      for (const auto& c : e.value("k_constraints", nlohmann::json::array())) {
        std::string expr = c.get<std::string>();
        if (!eval_bool(expr, env)) throw ConstraintError(id + ": k = " + out.k.str() + " violates " + expr);
      }
    }
    const std::size_t n = static_cast<std::size_t>(out.dim);
    for (const auto& g : e.at("generators")) {
      Generator gen;
      gen.name = g.at("name").get<std::string>();
      if (out.model == Model::Abelian) {
        gen.elem = AffineElement::abelian(detail::json_matrix(g.at("rot"), n, env), detail::json_vector(g.at("trans"), n, env));
      } else if (g.contains("h")) {
        QVector h = detail::json_vector(g.at("h"), 3, env);
        gen.elem = AffineElement::heisenberg(out.k, h[0], h[1], h[2], QMatrix::identity(3));
      } else {
        // psi image: three rows of four entries
        const auto& rows = g.at("psi");
        if (rows.size() != 3) throw CatalogError(id + ": psi image needs three rows");
        QMatrix m = QMatrix::identity(4);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 4; ++j) m(i, j) = detail::json_rational(rows[i].at(j), env);
        gen.elem = AffineElement{Model::Heisenberg, out.k, m};
      }
      if (!gen.elem.well_formed()) throw CatalogError(id + ": generator " + gen.name + " is not in the model's image");
      out.generators.push_back(std::move(gen));
    }
    return out;
  }

 private:
  nlohmann::json doc_;
  std::vector<std::string> ids_;
};

inline CatalogEntry catalog_lookup(const std::string& id, const Env& params = {}) {
  return Catalog::builtin().lookup(id, params);
}

}  // namespace nzeta
