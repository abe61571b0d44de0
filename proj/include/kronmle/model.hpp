#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <vector>

#include "kronmle/matrix.hpp"

namespace kronmle {

// n observations Y_1, ..., Y_n, each m1 x m2.
template <typename T>
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t m1, std::size_t m2, std::vector<Matrix<T>> data);

  // Splits Y = [Y_1 | ... | Y_n] (m1 x n*m2) into its n blocks.
  static SampleSet from_concatenated(std::size_t m2, const Matrix<T>& y);

  std::size_t m1() const { return m1_; }
  std::size_t m2() const { return m2_; }
  std::size_t n() const { return data_.size(); }
  // Number of columns of C in the canonical form; may be <= 0.
  long k() const {
    return static_cast<long>(n() * m2_) - static_cast<long>(m1_);
  }

  const std::vector<Matrix<T>>& data() const { return data_; }
  const Matrix<T>& operator[](std::size_t i) const { return data_[i]; }

  Matrix<T> concatenated() const;

 private:
  std::size_t m1_ = 0;
  std::size_t m2_ = 0;
  std::vector<Matrix<T>> data_;
};

template <typename U, typename T>
SampleSet<U> sample_cast(const SampleSet<T>& s) {
  std::vector<Matrix<U>> data;
  data.reserve(s.n());
  for (const auto& y : s.data()) data.push_back(matrix_cast<U>(y));
  return SampleSet<U>(s.m1(), s.m2(), std::move(data));
}

// Bounds on the existence/uniqueness sample-size thresholds:
// max{m1/m2, m2/m1} <= N_e <= N_u <= floor(m1/m2 + m2/m1) + 1.
struct ThresholdBounds {
  Rational lower;
  long upper = 0;
};

// n log det K - n tr(S K). Throws NotPositiveDefinite when K fails Cholesky.
double gaussian_loglik(const SymmetricMatrix<double>& s,
                       const SymmetricMatrix<double>& k, long n);

// n m2 log det K1 + n m1 log det K2 - tr(sum_i K1 Y_i K2 Y_i^T).
double kron_loglik(const SampleSet<double>& sample,
                   const SymmetricMatrix<double>& k1,
                   const SymmetricMatrix<double>& k2);

// sum_i Y_i K2 Y_i^T  (m1 x m1).
template <typename T>
SymmetricMatrix<T> row_scatter(const SampleSet<T>& sample,
                               const SymmetricMatrix<T>& k2);

// sum_i Y_i^T K1 Y_i  (m2 x m2).
template <typename T>
SymmetricMatrix<T> column_scatter(const SampleSet<T>& sample,
                                  const SymmetricMatrix<T>& k1);

// Maximizer of the log-likelihood over K1 for fixed K2:
// ((1 / (n m2)) sum_i Y_i K2 Y_i^T)^{-1}. Throws SingularMatrix when the
// scatter is rank deficient (always the case when n m2 < m1).
template <typename T>
SymmetricMatrix<T> profile_k1(const SampleSet<T>& sample,
                              const SymmetricMatrix<T>& k2);

// The analogous maximizer over K2 for fixed K1.
template <typename T>
SymmetricMatrix<T> profile_k2(const SampleSet<T>& sample,
                              const SymmetricMatrix<T>& k1);

// g(K) = m2 log det(sum_i Y_i K Y_i^T) - m1 log det K, through Cholesky
// log-determinants. Constant along rays; minimized at the MLE's K2.
double g_objective(const SampleSet<double>& sample,
                   const SymmetricMatrix<double>& k2);

// Profile log-likelihood evaluated directly:
// -n m2 log det((1/(n m2)) sum Y_i K2 Y_i^T) + n m1 log det K2 - n m1 m2.
double profile_loglik(const SampleSet<double>& sample,
                      const SymmetricMatrix<double>& k2);

ThresholdBounds thresholds(long m1, long m2);

// n independent draws A Z B with Z iid standard normal, filled column by
// column from SeededRng(seed). vec(A Z B) ~ N(0, (B^T B) kron (A A^T)).
SampleSet<double> sample_matrix_normal(const Matrix<double>& a,
                                       const Matrix<double>& b, std::size_t n,
                                       std::uint64_t seed);

// File format: "m1 m2 n" header, then Y = [Y_1 | ... | Y_n] as a matrix.
template <typename T>
SampleSet<T> read_sample_set(std::istream& in);

template <typename T>
void write_sample_set(std::ostream& out, const SampleSet<T>& sample);

}  // namespace kronmle
