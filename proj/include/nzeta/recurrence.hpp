#pragma once

#include <string>
#include <utility>
#include <vector>

#include "poly.hpp"

namespace nzeta {

/// Raised when a sequence does not satisfy a recurrence of the promised order.
class RecurrenceError : public AlgebraError {
 public:
  using AlgebraError::AlgebraError;
};

namespace detail {

// Berlekamp-Massey over a field; returns C(x) = 1 + c_1 x + ... with
// s_i + sum_j c_j s_{i-j} = 0 for i >= L, and the order L.
inline std::pair<QPoly, int> berlekamp_massey(const std::vector<Rational>& s) {
  std::vector<Rational> c{1}, b{1};
  int L = 0;
  int m = 1;
  Rational bd = 1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Rational d = s[i];
    for (int j = 1; j <= L; ++j)
      if (static_cast<std::size_t>(j) < c.size()) d += c[static_cast<std::size_t>(j)] * s[i - static_cast<std::size_t>(j)];
    if (d.is_zero()) {
      ++m;
      continue;
    }
    Rational coef = d / bd;
    std::vector<Rational> t = c;
    if (c.size() < b.size() + static_cast<std::size_t>(m)) c.resize(b.size() + static_cast<std::size_t>(m), Rational(0));
    for (std::size_t j = 0; j < b.size(); ++j) c[j + static_cast<std::size_t>(m)] -= coef * b[j];
    if (2 * L <= static_cast<int>(i)) {
      L = static_cast<int>(i) + 1 - L;
      b = std::move(t);
      bd = d;
      m = 1;
    } else {
      ++m;
    }
  }
  return {QPoly(std::move(c)), L};
}

}  // namespace detail

/// Coefficients c_1..c_n of the power series num/den with num(0) = 0.
inline std::vector<Rational> expand_shifted(const QPoly& num, const QPoly& den, std::size_t n) {
  auto all = series_div(num, den, n + 1);
  return std::vector<Rational>(all.begin() + 1, all.end());
}

/// Given seq = (c_1, c_2, ...), finds S(z) = sum c_k z^k = num/den with
/// den(0) = 1 from the first 2*bound + 2 terms, then checks every supplied term.
inline std::pair<QPoly, QPoly> berlekamp_massey_q(const std::vector<Rational>& seq, int bound) {
  const std::size_t fit = 2 * static_cast<std::size_t>(bound) + 2;
  if (bound < 0 || seq.size() < fit)
    throw RecurrenceError("berlekamp_massey_q: need at least 2*bound+2 terms");
  std::vector<Rational> head(seq.begin(), seq.begin() + static_cast<long>(fit));
  auto [den, order] = detail::berlekamp_massey(head);
  if (order > bound)
    throw RecurrenceError("recurrence order " + std::to_string(order) + " exceeds bound " + std::to_string(bound));
  // G(z) = sum_{i>=0} c_{i+1} z^i; P = G * C truncated below the order.
  std::vector<Rational> g(head.begin(), head.end());
  QPoly p = (QPoly(g) * den).truncated(static_cast<std::size_t>(order));
  QPoly num = p * QPoly::x();
  auto re = expand_shifted(num, den, seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (!(re[i] == seq[i]))
      throw RecurrenceError("reconstructed series disagrees at term " + std::to_string(i + 1));
  return {num, den};
}

}  // namespace nzeta
