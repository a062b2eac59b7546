#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "poly.hpp"
#include "rational.hpp"

namespace nzeta {

/// Dense row-major matrix over a commutative ring T.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, T(0)) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw AlgebraError("ragged matrix literal");
      for (const auto& v : r) a_.push_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    Matrix m(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }

  std::vector<T> column(std::size_t j) const {
    std::vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  T trace() const {
    require_square("trace");
    T t(0);
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  bool is_identity() const { return is_square() && *this == identity(rows_); }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    a.require_same(b, "+");
    Matrix m = a;
    for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] += b.a_[i];
    return m;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    a.require_same(b, "-");
    Matrix m = a;
    for (std::size_t i = 0; i < m.a_.size(); ++i) m.a_[i] -= b.a_[i];
    return m;
  }
  friend Matrix operator-(const Matrix& a) {
    Matrix m = a;
    for (auto& v : m.a_) v = -v;
    return m;
  }
  friend Matrix operator*(const T& s, const Matrix& a) {
    Matrix m = a;
    for (auto& v : m.a_) v = s * v;
    return m;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw AlgebraError("matrix product shape mismatch");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }
  friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
    if (a.cols_ != v.size()) throw AlgebraError("matrix-vector shape mismatch");
    std::vector<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      os << (i ? ", [" : "[");
      for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << (*this)(i, j);
      os << "]";
    }
    os << "]";
    return os.str();
  }
  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) { return os << m.str(); }

  void require_square(const char* what) const {
    if (!is_square()) throw AlgebraError(std::string(what) + ": matrix is not square");
  }

 private:
  void require_same(const Matrix& b, const char* op) const {
    if (rows_ != b.rows_ || cols_ != b.cols_)
      throw AlgebraError(std::string("matrix ") + op + " shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

using QMatrix = Matrix<Rational>;
using QVector = std::vector<Rational>;

template <class T>
Matrix<T> matrix_power(const Matrix<T>& m, unsigned long e) {
  m.require_square("power");
  Matrix<T> result = Matrix<T>::identity(m.rows());
  Matrix<T> base = m;
  while (e) {
    if (e & 1UL) result = result * base;
    e >>= 1UL;
    if (e) base = base * base;
  }
  return result;
}

/// Determinant by Gaussian elimination; T must be a field.
template <class T>
T det(Matrix<T> m) {
  m.require_square("det");
  const std::size_t n = m.rows();
  T d(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c).is_zero()) ++p;
    if (p == n) return T(0);
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    T inv = T(1) / m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m(r, c).is_zero()) continue;
      T f = m(r, c) * inv;
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return d;
}

/// Reduced row echelon form in place; returns pivot columns.
template <class T>
std::vector<std::size_t> rref(Matrix<T>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
    std::size_t p = row;
    while (p < m.rows() && m(p, c).is_zero()) ++p;
    if (p == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(row, j));
    T inv = T(1) / m(row, c);
    for (std::size_t j = 0; j < m.cols(); ++j) m(row, j) *= inv;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, c).is_zero()) continue;
      T f = m(r, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

template <class T>
std::size_t rank(Matrix<T> m) {
  return rref(m).size();
}

/// Basis of the right null space, one vector per free column.
template <class T>
std::vector<std::vector<T>> kernel(Matrix<T> m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(m.cols(), T(0));
    v[f] = T(1);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& m) {
  m.require_square("inverse");
  const std::size_t n = m.rows();
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = T(1);
  }
  auto pivots = rref(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) throw AlgebraError("matrix is singular");
  return aug.block(0, n, n, n);
}

/// Solves A x = b exactly; returns false when inconsistent. Free variables are set to 0.
template <class T>
bool solve_linear(const Matrix<T>& a, const std::vector<T>& b, std::vector<T>* x) {
  Matrix<T> aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == a.cols()) return false;
  std::vector<T> sol(a.cols(), T(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) sol[pivots[i]] = aug(i, a.cols());
  if (x) *x = std::move(sol);
  return true;
}

/// det(xI - M), monic, via the Faddeev-LeVerrier recursion.
inline QPoly charpoly(const QMatrix& m) {
  m.require_square("charpoly");
  const std::size_t n = m.rows();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  QMatrix mk(n, n);  // M_0 = 0
  QMatrix id = QMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk + c[n - k + 1] * id;
    QMatrix am = m * mk;
    c[n - k] = -am.trace() / Rational(static_cast<long>(k));
  }
  return QPoly(std::move(c));
}

/// det(I - z M) as a polynomial in z.
inline QPoly det_one_minus_z(const QMatrix& m) {
  QPoly chi = charpoly(m);
  // z^n chi(1/z) = sum c_i z^(n-i)
  std::vector<Rational> c(chi.coeffs().rbegin(), chi.coeffs().rend());
  return QPoly(std::move(c));
}

inline std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t n, std::size_t j) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == j) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

/// j-th exterior power: the matrix of j x j minors, subsets in lexicographic order.
inline QMatrix exterior_power(const QMatrix& m, std::size_t j) {
  m.require_square("exterior_power");
  const std::size_t n = m.rows();
  if (j > n) throw AlgebraError("exterior_power: degree exceeds dimension");
  auto subs = subsets_of_size(n, j);
  QMatrix out(subs.size(), subs.size());
  for (std::size_t r = 0; r < subs.size(); ++r)
    for (std::size_t c = 0; c < subs.size(); ++c) {
      if (j == 0) {
        out(r, c) = 1;
        continue;
      }
      QMatrix minor(j, j);
      for (std::size_t a = 0; a < j; ++a)
        for (std::size_t b = 0; b < j; ++b) minor(a, b) = m(subs[r][a], subs[c][b]);
      out(r, c) = det(minor);
    }
  return out;
}

}  // namespace nzeta
