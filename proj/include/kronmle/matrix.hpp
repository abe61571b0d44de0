#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kronmle/errors.hpp"
#include "kronmle/scalar.hpp"

namespace kronmle {

// Dense row-major matrix over a field (double or Rational). Operations never
// modify their arguments; they return fresh values.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionMismatch("entry count does not match " +
                              std::to_string(rows_) + "x" +
                              std::to_string(cols_));
    }
  }

  Matrix(std::initializer_list<std::initializer_list<T>> rows)
      : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionMismatch("ragged initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix diagonal(std::span<const T> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<T> values) {
    return diagonal(std::span<const T>(values.begin(), values.size()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  std::span<const T> entries() const { return data_; }

  Matrix block(std::size_t row0, std::size_t col0, std::size_t nrows,
               std::size_t ncols) const {
    if (row0 + nrows > rows_ || col0 + ncols > cols_) {
      throw DimensionMismatch("block out of range");
    }
    Matrix out(nrows, ncols);
    for (std::size_t i = 0; i < nrows; ++i)
      for (std::size_t j = 0; j < ncols; ++j)
        out(i, j) = (*this)(row0 + i, col0 + j);
    return out;
  }

  Matrix transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> operator+(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("operator+: shape mismatch");
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

template <typename T>
Matrix<T> operator-(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("operator-: shape mismatch");
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

template <typename T>
Matrix<T> operator-(const Matrix<T>& a) {
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = -a(i, j);
  return out;
}

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows())
    throw DimensionMismatch("operator*: inner dimensions differ (" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + ")");
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T& ail = a(i, l);
      if (ail == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
    }
  }
  return out;
}

template <typename T>
Matrix<T> operator*(const T& s, const Matrix<T>& a) {
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const T& s) {
  return s * a;
}

template <typename T>
Matrix<T> operator/(const Matrix<T>& a, const T& s) {
  Matrix<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) / s;
  return out;
}

// Block (i, j) of the result equals a(i, j) * b.
template <typename T>
Matrix<T> kron(const Matrix<T>& a, const Matrix<T>& b) {
  Matrix<T> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

template <typename T>
Matrix<T> hstack(std::span<const Matrix<T>> parts) {
  if (parts.empty()) return {};
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionMismatch("hstack: row counts differ");
    cols += p.cols();
  }
  Matrix<T> out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) out(i, offset + j) = p(i, j);
    offset += p.cols();
  }
  return out;
}

template <typename T>
Matrix<T> vstack(const Matrix<T>& top, const Matrix<T>& bottom) {
  if (top.cols() != bottom.cols())
    throw DimensionMismatch("vstack: column counts differ");
  Matrix<T> out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t i = 0; i < top.rows(); ++i)
    for (std::size_t j = 0; j < top.cols(); ++j) out(i, j) = top(i, j);
  for (std::size_t i = 0; i < bottom.rows(); ++i)
    for (std::size_t j = 0; j < top.cols(); ++j)
      out(top.rows() + i, j) = bottom(i, j);
  return out;
}

template <typename T>
T trace(const Matrix<T>& a) {
  if (!a.is_square()) throw DimensionMismatch("trace: matrix is not square");
  T sum(0);
  for (std::size_t i = 0; i < a.rows(); ++i) sum += a(i, i);
  return sum;
}

template <typename T>
double max_abs(const Matrix<T>& a) {
  double m = 0.0;
  for (const T& x : a.entries()) m = std::max(m, std::fabs(to_double(x)));
  return m;
}

template <typename U, typename T>
Matrix<U> matrix_cast(const Matrix<T>& a) {
  Matrix<U> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if constexpr (std::is_same_v<U, double>) {
        out(i, j) = to_double(a(i, j));
      } else {
        out(i, j) = U(a(i, j));
      }
    }
  }
  return out;
}

// Symmetric matrix stored as its upper triangle. Positive definiteness is a
// checkable predicate, not a construction-time invariant.
template <typename T>
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;

  explicit SymmetricMatrix(std::size_t dim)
      : dim_(dim), upper_(dim * (dim + 1) / 2, T(0)) {}

  // Requires exact symmetry.
  explicit SymmetricMatrix(const Matrix<T>& m) : SymmetricMatrix(m.rows()) {
    if (!m.is_square()) throw DimensionMismatch("symmetric: not square");
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i; j < dim_; ++j) {
        if (m(i, j) != m(j, i))
          throw std::invalid_argument("symmetric: matrix is not symmetric");
        upper_[index(i, j)] = m(i, j);
      }
    }
  }

  SymmetricMatrix(std::initializer_list<std::initializer_list<T>> rows)
      : SymmetricMatrix(Matrix<T>(rows)) {}

  // (m + m^T) / 2.
  static SymmetricMatrix symmetrize(const Matrix<T>& m) {
    if (!m.is_square()) throw DimensionMismatch("symmetrize: not square");
    SymmetricMatrix out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = i; j < m.rows(); ++j)
        out.upper_[out.index(i, j)] = (m(i, j) + m(j, i)) / T(2);
    return out;
  }

  static SymmetricMatrix identity(std::size_t dim) {
    SymmetricMatrix out(dim);
    for (std::size_t i = 0; i < dim; ++i) out.upper_[out.index(i, i)] = T(1);
    return out;
  }

  std::size_t dim() const { return dim_; }

  const T& operator()(std::size_t i, std::size_t j) const {
    return upper_[i <= j ? index(i, j) : index(j, i)];
  }

  void set(std::size_t i, std::size_t j, T value) {
    upper_[i <= j ? index(i, j) : index(j, i)] = std::move(value);
  }

  Matrix<T> full() const {
    Matrix<T> out(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) = (*this)(i, j);
    return out;
  }

  SymmetricMatrix scaled(const T& s) const {
    SymmetricMatrix out = *this;
    for (auto& x : out.upper_) x *= s;
    return out;
  }

  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.dim_ == b.dim_ && a.upper_ == b.upper_;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * dim_ - i * (i + 1) / 2 + j;
  }

  std::size_t dim_ = 0;
  std::vector<T> upper_;
};

template <typename U, typename T>
SymmetricMatrix<U> symmetric_cast(const SymmetricMatrix<T>& a) {
  return SymmetricMatrix<U>(matrix_cast<U>(a.full()));
}

// Exact over Rational (fraction-free Bareiss after clearing row
// denominators); LU with partial pivoting over double.
template <typename T>
T det(const Matrix<T>& a);

// log|det(a)| via LU; -inf for an exactly singular matrix.
double log_abs_det(const Matrix<double>& a);

// Throws SingularMatrix. Over double, a pivot below 1e-12 * max|a_ij| counts
// as singular.
template <typename T>
Matrix<T> inverse(const Matrix<T>& a);

template <typename T>
Matrix<T> solve(const Matrix<T>& a, const Matrix<T>& b);

template <>
double det(const Matrix<double>& a);
template <>
Rational det(const Matrix<Rational>& a);
template <>
Matrix<double> inverse(const Matrix<double>& a);
template <>
Matrix<Rational> inverse(const Matrix<Rational>& a);
template <>
Matrix<double> solve(const Matrix<double>& a, const Matrix<double>& b);
template <>
Matrix<Rational> solve(const Matrix<Rational>& a, const Matrix<Rational>& b);

template <typename T>
SymmetricMatrix<T> inverse(const SymmetricMatrix<T>& a) {
  return SymmetricMatrix<T>::symmetrize(inverse(a.full()));
}

// LDL^T pivots all strictly positive. Exact over Rational.
template <typename T>
bool is_positive_definite(const SymmetricMatrix<T>& s);

extern template bool is_positive_definite(const SymmetricMatrix<double>&);
extern template bool is_positive_definite(const SymmetricMatrix<Rational>&);

// Lower-triangular L with L L^T = s, or nullopt when s is not positive
// definite.
std::optional<Matrix<double>> cholesky(const SymmetricMatrix<double>& s);

// log det through the Cholesky factor; throws NotPositiveDefinite.
double log_det_pd(const SymmetricMatrix<double>& s);

}  // namespace kronmle
