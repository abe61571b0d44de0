#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "kronmle/matrix.hpp"
#include "kronmle/model.hpp"
#include "kronmle/random.hpp"
#include "kronmle/scalar.hpp"

namespace kronmle::testing {

template <typename T>
Matrix<T> random_int_matrix(SeededRng& rng, std::size_t rows, std::size_t cols,
                            long lo, long hi) {
  Matrix<T> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = T(static_cast<long>(rng.uniform_int(lo, hi)));
  return m;
}

inline Matrix<double> random_gaussian_matrix(SeededRng& rng, std::size_t rows,
                                             std::size_t cols) {
  Matrix<double> m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// L L^T + I with integer L, which is always positive definite.
template <typename T>
SymmetricMatrix<T> random_pd(SeededRng& rng, std::size_t dim, long spread = 3) {
  const Matrix<T> l = random_int_matrix<T>(rng, dim, dim, -spread, spread);
  return SymmetricMatrix<T>(l * l.transpose() + Matrix<T>::identity(dim));
}

inline SymmetricMatrix<double> random_pd_gaussian(SeededRng& rng, std::size_t dim) {
  const Matrix<double> l = random_gaussian_matrix(rng, dim, dim);
  return SymmetricMatrix<double>::symmetrize(
      l * l.transpose() + 0.5 * Matrix<double>::identity(dim));
}

// Gaussian matrix shifted toward the identity so it is well conditioned.
inline Matrix<double> random_nonsingular(SeededRng& rng, std::size_t dim) {
  Matrix<double> a = random_gaussian_matrix(rng, dim, dim);
  for (std::size_t i = 0; i < dim; ++i) a(i, i) += 3.0;
  return a;
}

inline SampleSet<double> gaussian_sample(SeededRng& rng, std::size_t m1,
                                         std::size_t m2, std::size_t n) {
  std::vector<Matrix<double>> data;
  for (std::size_t i = 0; i < n; ++i) data.push_back(random_gaussian_matrix(rng, m1, m2));
  return SampleSet<double>(m1, m2, std::move(data));
}

struct ReductionShape {
  std::size_t m1, m2, n, k;
};

// 2 <= m2 <= 4, 1 <= k <= 4, 1 <= m1 <= 10 with m1 = n m2 - k.
inline ReductionShape random_reduction_shape(SeededRng& rng) {
  const std::size_t m2 = static_cast<std::size_t>(rng.uniform_int(2, 4));
  const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 4));
  const std::size_t n_lo = (k + 1 + m2 - 1) / m2;
  const std::size_t n_hi = (10 + k) / m2;
  const std::size_t n = static_cast<std::size_t>(
      rng.uniform_int(static_cast<long>(n_lo), static_cast<long>(n_hi)));
  return {n * m2 - k, m2, n, k};
}

// Leibniz expansion over all permutations; only for small matrices.
template <typename T>
T leibniz_det(const Matrix<T>& a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  T total(0);
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    T prod(1);
    for (std::size_t i = 0; i < n; ++i) prod *= a(i, perm[i]);
    if (inversions % 2) total -= prod; else total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

template <typename T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  return max_abs(a - b);
}

template <typename T>
double max_abs_diff(const SymmetricMatrix<T>& a, const SymmetricMatrix<T>& b) {
  return max_abs(a.full() - b.full());
}

// Column-stacking vectorization.
inline std::vector<double> vec(const Matrix<double>& y) {
  std::vector<double> out;
  for (std::size_t j = 0; j < y.cols(); ++j)
    for (std::size_t i = 0; i < y.rows(); ++i) out.push_back(y(i, j));
  return out;
}

}  // namespace kronmle::testing
