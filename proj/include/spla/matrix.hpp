#ifndef SPLA_MATRIX_HPP
#define SPLA_MATRIX_HPP

#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <vector>

#include "spla/error.hpp"

namespace spla {

using Vector = std::vector<double>;
using Index = std::size_t;
using IndexList = std::vector<Index>;

/// Dense row-major matrix of doubles with value semantics.
class Matrix {
 public:
  Matrix() = default;

  Matrix(Index rows, Index cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  /// Row-wise literal: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) {
        throw Error(ErrorKind::InvalidArgument, "ragged matrix literal");
      }
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (Index i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Builds a matrix whose columns are the given vectors (all of equal length).
  static Matrix from_columns(const std::vector<Vector>& columns, Index rows) {
    Matrix m(rows, columns.size());
    for (Index j = 0; j < columns.size(); ++j) m.set_col(j, columns[j]);
    return m;
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(Index i, Index j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(Index i, Index j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  std::span<const double> row(Index i) const { return {data_.data() + i * cols_, cols_}; }

  Vector col(Index j) const {
    Vector v(rows_);
    for (Index i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  void set_col(Index j, std::span<const double> v) {
    if (v.size() != rows_) throw Error(ErrorKind::InvalidArgument, "column length mismatch");
    for (Index i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Sub-matrix on the given row and column index lists (in list order).
  Matrix select(std::span<const Index> row_idx, std::span<const Index> col_idx) const {
    Matrix s(row_idx.size(), col_idx.size());
    for (Index a = 0; a < row_idx.size(); ++a)
      for (Index b = 0; b < col_idx.size(); ++b) s(a, b) = (*this)(row_idx[a], col_idx[b]);
    return s;
  }

  Matrix select_cols(std::span<const Index> col_idx) const {
    Matrix s(rows_, col_idx.size());
    for (Index i = 0; i < rows_; ++i)
      for (Index b = 0; b < col_idx.size(); ++b) s(i, b) = (*this)(i, col_idx[b]);
    return s;
  }

  double trace() const {
    double t = 0.0;
    for (Index i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (Index k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (Index k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(ErrorKind::InvalidArgument, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (Index i = 0; i < a.rows_; ++i)
      for (Index k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (Index j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw Error(ErrorKind::InvalidArgument, "matrix-vector shape mismatch");
    Vector y(a.rows_, 0.0);
    for (Index i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (Index j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
  }

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

/// aᵀ·x without forming the transpose.
inline Vector transpose_times(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw Error(ErrorKind::InvalidArgument, "matrix-vector shape mismatch");
  Vector y(a.cols(), 0.0);
  for (Index i = 0; i < a.rows(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (Index j = 0; j < a.cols(); ++j) y[j] += a(i, j) * xi;
  }
  return y;
}

/// aᵀ·b without forming the transpose.
inline Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "matrix product shape mismatch");
  Matrix c(a.cols(), b.cols());
  for (Index k = 0; k < a.rows(); ++k)
    for (Index i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      for (Index j = 0; j < b.cols(); ++j) c(i, j) += aki * b(k, j);
    }
  return c;
}

/// uᵀ·a·u for square a.
inline double quadratic_form(const Matrix& a, std::span<const double> u) {
  const Vector au = a * u;
  return std::inner_product(u.begin(), u.end(), au.begin(), 0.0);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double norm1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline double norm_inf(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

inline void scale(std::span<double> v, double s) {
  for (double& x : v) x *= s;
}

/// Normalizes v in place; returns the original norm (v untouched when zero).
inline double normalize(std::span<double> v) {
  const double n = norm2(v);
  if (n > 0.0) scale(v, 1.0 / n);
  return n;
}

/// Largest |a_ij − a_ji| over a square matrix.
inline double asymmetry(const Matrix& a) {
  double m = 0.0;
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

/// Relative Frobenius distance ‖a − b‖ / max(‖b‖, tiny).
inline double relative_error(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.frobenius_norm(), 1e-300);
  return (a - b).frobenius_norm() / denom;
}

}  // namespace spla

#endif  // SPLA_MATRIX_HPP
