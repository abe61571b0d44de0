#include "kronmle/matrix.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace kronmle {

namespace {

constexpr double kPivotTolerance = 1e-12;

void require_square(const Matrix<double>& a, const char* what) {
  if (!a.is_square()) throw DimensionMismatch(std::string(what) + ": not square");
}

void require_square(const Matrix<Rational>& a, const char* what) {
  if (!a.is_square()) throw DimensionMismatch(std::string(what) + ": not square");
}

// In-place LU with partial pivoting. Returns the permutation sign, 0 if an
// exactly zero column was met.
int lu_decompose(Matrix<double>& lu, std::vector<std::size_t>& perm) {
  const std::size_t n = lu.rows();
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::fabs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(lu(r, col)) > best) {
        best = std::fabs(lu(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) return 0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(pivot, j));
      std::swap(perm[col], perm[pivot]);
      sign = -sign;
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      lu(r, col) = f;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
    }
  }
  return sign;
}

Integer lcm_of_denominators(const Matrix<Rational>& a, std::size_t row) {
  Integer l = 1;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(row, j).get_den_mpz_t());
  }
  return l;
}

Integer bareiss_det(std::vector<std::vector<Integer>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Integer v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m[i][j] = std::move(v);
      }
    }
    prev = m[k][k];
  }
  Integer d = m[n - 1][n - 1];
  return sign < 0 ? Integer(-d) : d;
}

// Gauss-Jordan elimination on [a | b] over the rationals.
Matrix<Rational> gauss_jordan(const Matrix<Rational>& a,
                              const Matrix<Rational>& b) {
  const std::size_t n = a.rows();
  const std::size_t w = b.cols();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + w));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a(i, j);
    for (std::size_t j = 0; j < w; ++j) m[i][n + j] = b(i, j);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) throw SingularMatrix("matrix is singular (exact)");
    std::swap(m[col], m[pivot]);
    const Rational inv = 1 / m[col][col];
    for (std::size_t j = col; j < n + w; ++j) m[col][j] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t j = col; j < n + w; ++j) m[r][j] -= f * m[col][j];
    }
  }
  Matrix<Rational> x(n, w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) x(i, j) = m[i][n + j];
  return x;
}

Matrix<double> lu_solve(const Matrix<double>& a, const Matrix<double>& b) {
  const std::size_t n = a.rows();
  Matrix<double> lu = a;
  std::vector<std::size_t> perm;
  const int sign = lu_decompose(lu, perm);
  const double threshold = kPivotTolerance * max_abs(a);
  bool singular = sign == 0;
  for (std::size_t i = 0; i < n && !singular; ++i) {
    if (!(std::fabs(lu(i, i)) >= threshold) || lu(i, i) == 0.0) singular = true;
  }
  if (singular) {
    std::ostringstream msg;
    msg << "matrix is singular (pivot below " << kPivotTolerance
        << " * max|entry|)";
    throw SingularMatrix(msg.str());
  }
  Matrix<double> x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= lu(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= lu(ii, j) * x(j, c);
      x(ii, c) = s / lu(ii, ii);
    }
  }
  return x;
}

}  // namespace

template <>
double det(const Matrix<double>& a) {
  require_square(a, "det");
  Matrix<double> lu = a;
  std::vector<std::size_t> perm;
  const int sign = lu_decompose(lu, perm);
  if (sign == 0) return 0.0;
  double d = sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= lu(i, i);
  return d;
}

template <>
Rational det(const Matrix<Rational>& a) {
  require_square(a, "det");
  const std::size_t n = a.rows();
  std::vector<std::vector<Integer>> m(n, std::vector<Integer>(n));
  Integer scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Integer l = lcm_of_denominators(a, i);
    scale *= l;
    for (std::size_t j = 0; j < n; ++j) {
      Integer v = a(i, j).get_num() * l;
      mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), a(i, j).get_den_mpz_t());
      m[i][j] = std::move(v);
    }
  }
  Rational d(bareiss_det(std::move(m)), scale);
  d.canonicalize();
  return d;
}

double log_abs_det(const Matrix<double>& a) {
  require_square(a, "log_abs_det");
  Matrix<double> lu = a;
  std::vector<std::size_t> perm;
  if (lu_decompose(lu, perm) == 0) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += std::log(std::fabs(lu(i, i)));
  return s;
}

template <>
Matrix<double> inverse(const Matrix<double>& a) {
  require_square(a, "inverse");
  return lu_solve(a, Matrix<double>::identity(a.rows()));
}

template <>
Matrix<Rational> inverse(const Matrix<Rational>& a) {
  require_square(a, "inverse");
  return gauss_jordan(a, Matrix<Rational>::identity(a.rows()));
}

template <>
Matrix<double> solve(const Matrix<double>& a, const Matrix<double>& b) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) throw DimensionMismatch("solve: row mismatch");
  return lu_solve(a, b);
}

template <>
Matrix<Rational> solve(const Matrix<Rational>& a, const Matrix<Rational>& b) {
  require_square(a, "solve");
  if (b.rows() != a.rows()) throw DimensionMismatch("solve: row mismatch");
  return gauss_jordan(a, b);
}

template <typename T>
bool is_positive_definite(const SymmetricMatrix<T>& s) {
  const std::size_t n = s.dim();
  Matrix<T> m = s.full();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(m(k, k) > 0)) return false;
    for (std::size_t i = k + 1; i < n; ++i) {
      const T f = m(i, k) / m(k, k);
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return true;
}

template bool is_positive_definite(const SymmetricMatrix<double>&);
template bool is_positive_definite(const SymmetricMatrix<Rational>&);

std::optional<Matrix<double>> cholesky(const SymmetricMatrix<double>& s) {
  const std::size_t n = s.dim();
  Matrix<double> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0.0)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t p = 0; p < j; ++p) v -= l(i, p) * l(j, p);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

double log_det_pd(const SymmetricMatrix<double>& s) {
  const auto l = cholesky(s);
  if (!l) throw NotPositiveDefinite("log_det_pd: matrix is not positive definite");
  double sum = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) sum += std::log((*l)(i, i));
  return 2.0 * sum;
}

}  // namespace kronmle
