#pragma once

// A small arithmetic language for the data files: rational constants,
// named parameters, the formal variable z, + - * / ^, comparisons, && || !,
// and a handful of helper functions. Every value is a QPoly in z; booleans
// are the constants 0 and 1.

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "poly.hpp"

namespace nzeta {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Env = std::map<std::string, Rational>;

namespace detail {

class ExprParser {
 public:
  ExprParser(std::string_view src, const Env& env) : s_(src), env_(env) {}

  QPoly run() {
    QPoly v = parse_or();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExprError("in \"" + std::string(s_) + "\": " + what);
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(i_, tok.size()) == tok) {
      i_ += tok.size();
      return true;
    }
    return false;
  }

  Rational scalar(const QPoly& p, const char* where) const {
    if (p.degree() > 0) fail(std::string(where) + " needs a constant operand");
    return p[0];
  }
  static QPoly boolean(bool b) { return QPoly::constant(Rational(b ? 1 : 0)); }

  QPoly parse_or() {
    QPoly v = parse_and();
    while (eat("||")) {
      QPoly w = parse_and();
      v = boolean(!scalar(v, "||").is_zero() || !scalar(w, "||").is_zero());
    }
    return v;
  }

  QPoly parse_and() {
    QPoly v = parse_cmp();
    while (eat("&&")) {
      QPoly w = parse_cmp();
      v = boolean(!scalar(v, "&&").is_zero() && !scalar(w, "&&").is_zero());
    }
    return v;
  }

  QPoly parse_cmp() {
    QPoly v = parse_sum();
    static const char* ops[] = {"==", "!=", "<=", ">=", "<", ">"};
    for (const char* op : ops) {
      if (!eat(op)) continue;
      QPoly w = parse_sum();
      std::string o(op);
      if (o == "==") return boolean(v == w);
      if (o == "!=") return boolean(!(v == w));
      Rational a = scalar(v, op), b = scalar(w, op);
      if (o == "<=") return boolean(a <= b);
      if (o == ">=") return boolean(a >= b);
      if (o == "<") return boolean(a < b);
      return boolean(a > b);
    }
    return v;
  }

  QPoly parse_sum() {
    QPoly v = parse_term();
    while (true) {
      if (eat("+"))
        v += parse_term();
      else if (eat("-"))
        v -= parse_term();
      else
        return v;
    }
  }

  QPoly parse_term() {
    QPoly v = parse_unary();
    while (true) {
      skip();
      if (i_ < s_.size() && s_[i_] == '*') {
        ++i_;
        v = v * parse_unary();
      } else if (i_ < s_.size() && s_[i_] == '/') {
        ++i_;
        Rational d = scalar(parse_unary(), "/");
        if (d.is_zero()) fail("division by zero");
        v = v * (Rational(1) / d);
      } else {
        return v;
      }
    }
  }

  QPoly parse_unary() {
    if (eat("-")) return -parse_unary();
    if (eat("+")) return parse_unary();
    if (eat("!")) return boolean(scalar(parse_unary(), "!").is_zero());
    return parse_pow();
  }

  QPoly parse_pow() {
    QPoly base = parse_atom();
    if (!eat("^")) return base;
    // right associative; exponent must be a nonnegative integer
    Rational e = scalar(parse_unary(), "^");
    if (!e.is_integer() || e.sign() < 0) fail("exponent must be a nonnegative integer");
    long n = *e.to_long();
    QPoly out = QPoly::constant(1);
    for (long j = 0; j < n; ++j) out = out * base;
    return out;
  }

  std::vector<QPoly> args() {
    std::vector<QPoly> out;
    if (eat(")")) return out;
    do out.push_back(parse_or());
    while (eat(","));
    if (!eat(")")) fail("expected ')'");
    return out;
  }

  QPoly call(const std::string& fn, const std::vector<QPoly>& a) {
    auto want = [&](std::size_t n) {
      if (a.size() != n) fail(fn + " takes " + std::to_string(n) + " argument(s)");
    };
    auto sc = [&](std::size_t j) { return scalar(a[j], fn.c_str()); };
    if (fn == "abs") {
      want(1);
      return QPoly::constant(abs(sc(0)));
    }
    if (fn == "isint") {
      want(1);
      return boolean(sc(0).is_integer());
    }
    if (fn == "odd" || fn == "even") {
      want(1);
      Rational x = sc(0);
      if (!x.is_integer()) return boolean(false);
      bool odd = BigInt(x.num() % 2) != 0;
      return boolean(fn == "odd" ? odd : !odd);
    }
    if (fn == "mod") {
      // x - m*floor(x/m), valid for rationals
      want(2);
      Rational x = sc(0), m = sc(1);
      if (m.sign() <= 0) fail("mod needs a positive modulus");
      return QPoly::constant(x - m * Rational((x / m).floor()));
    }
    if (fn == "floor") {
      want(1);
      return QPoly::constant(Rational(sc(0).floor()));
    }
    if (fn == "min" || fn == "max") {
      if (a.empty()) fail(fn + " needs arguments");
      Rational best = sc(0);
      for (std::size_t j = 1; j < a.size(); ++j) {
        Rational x = sc(j);
        if (fn == "min" ? x < best : x > best) best = x;
      }
      return QPoly::constant(best);
    }
    if (fn == "maxabs" || fn == "minabs") {
      // the argument (with its sign) of largest / smallest modulus; first wins ties
      if (a.empty()) fail(fn + " needs arguments");
      Rational best = sc(0);
      for (std::size_t j = 1; j < a.size(); ++j) {
        Rational x = sc(j);
        if (fn == "maxabs" ? abs(x) > abs(best) : abs(x) < abs(best)) best = x;
      }
      return QPoly::constant(best);
    }
    if (fn == "lone") {
      // of three values, the one alone on its side of modulus 1
      want(3);
      Rational v[3] = {sc(0), sc(1), sc(2)};
      int big = 0;
      for (auto& x : v) big += abs(x) > Rational(1) ? 1 : 0;
      if (big == 0 || big == 3) fail("lone: no value is alone in its modulus class");
      for (auto& x : v)
        if ((abs(x) > Rational(1)) == (big == 1)) return QPoly::constant(x);
    }
    fail("unknown function " + fn);
  }

  QPoly parse_atom() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of expression");
    char ch = s_[i_];
    if (ch == '(') {
      ++i_;
      QPoly v = parse_or();
      if (!eat(")")) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      Rational v = Rational::parse(s_.substr(i_, j - i_));
      i_ = j;
      return QPoly::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      std::string name(s_.substr(i_, j - i_));
      i_ = j;
      if (eat("(")) return call(name, args());
      if (name == "z") return QPoly::x();
      auto it = env_.find(name);
      if (it == env_.end()) fail("unknown name " + name);
      return QPoly::constant(it->second);
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  std::string_view s_;
  const Env& env_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline QPoly eval_poly(std::string_view src, const Env& env) { return detail::ExprParser(src, env).run(); }

inline Rational eval_scalar(std::string_view src, const Env& env) {
  QPoly p = eval_poly(src, env);
  if (p.degree() > 0) throw ExprError("in \"" + std::string(src) + "\": expected a constant, got a polynomial in z");
  return p[0];
}

inline bool eval_bool(std::string_view src, const Env& env) { return !eval_scalar(src, env).is_zero(); }

}  // namespace nzeta
