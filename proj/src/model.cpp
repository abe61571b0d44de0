#include "kronmle/model.hpp"

#include <cmath>
#include <string>

#include "kronmle/matrix_io.hpp"
#include "kronmle/random.hpp"

namespace kronmle {

template <typename T>
SampleSet<T>::SampleSet(std::size_t m1, std::size_t m2,
                        std::vector<Matrix<T>> data)
    : m1_(m1), m2_(m2), data_(std::move(data)) {
  if (m1_ == 0 || m2_ == 0) throw DimensionMismatch("sample dims must be positive");
  for (const auto& y : data_) {
    if (y.rows() != m1_ || y.cols() != m2_) {
      throw DimensionMismatch("sample matrix is " + std::to_string(y.rows()) +
                              "x" + std::to_string(y.cols()) + ", expected " +
                              std::to_string(m1_) + "x" + std::to_string(m2_));
    }
  }
}

template <typename T>
SampleSet<T> SampleSet<T>::from_concatenated(std::size_t m2, const Matrix<T>& y) {
  if (m2 == 0 || y.cols() % m2 != 0) {
    throw DimensionMismatch("concatenated width is not a multiple of m2");
  }
  std::vector<Matrix<T>> data;
  for (std::size_t i = 0; i < y.cols() / m2; ++i) {
    data.push_back(y.block(0, i * m2, y.rows(), m2));
  }
  return SampleSet(y.rows(), m2, std::move(data));
}

template <typename T>
Matrix<T> SampleSet<T>::concatenated() const {
  return hstack<T>(data_);
}

template class SampleSet<double>;
template class SampleSet<Rational>;

double gaussian_loglik(const SymmetricMatrix<double>& s,
                       const SymmetricMatrix<double>& k, long n) {
  if (s.dim() != k.dim()) throw DimensionMismatch("gaussian_loglik: S and K differ in dim");
  const double logdet = log_det_pd(k);
  const double tr = trace(s.full() * k.full());
  return static_cast<double>(n) * (logdet - tr);
}

template <typename T>
SymmetricMatrix<T> row_scatter(const SampleSet<T>& sample,
                               const SymmetricMatrix<T>& k2) {
  if (k2.dim() != sample.m2()) throw DimensionMismatch("row_scatter: K2 must be m2 x m2");
  const Matrix<T> k = k2.full();
  Matrix<T> sum(sample.m1(), sample.m1());
  for (const auto& y : sample.data()) sum = sum + y * k * y.transpose();
  return SymmetricMatrix<T>::symmetrize(sum);
}

template <typename T>
SymmetricMatrix<T> column_scatter(const SampleSet<T>& sample,
                                  const SymmetricMatrix<T>& k1) {
  if (k1.dim() != sample.m1()) throw DimensionMismatch("column_scatter: K1 must be m1 x m1");
  const Matrix<T> k = k1.full();
  Matrix<T> sum(sample.m2(), sample.m2());
  for (const auto& y : sample.data()) sum = sum + y.transpose() * k * y;
  return SymmetricMatrix<T>::symmetrize(sum);
}

double kron_loglik(const SampleSet<double>& sample,
                   const SymmetricMatrix<double>& k1,
                   const SymmetricMatrix<double>& k2) {
  if (k1.dim() != sample.m1() || k2.dim() != sample.m2()) {
    throw DimensionMismatch("kron_loglik: factor dims do not match (m1, m2)");
  }
  const double n = static_cast<double>(sample.n());
  const double m1 = static_cast<double>(sample.m1());
  const double m2 = static_cast<double>(sample.m2());
  const double ld1 = log_det_pd(k1);
  const double ld2 = log_det_pd(k2);
  const double tr = trace(k1.full() * row_scatter(sample, k2).full());
  return n * m2 * ld1 + n * m1 * ld2 - tr;
}

template <typename T>
SymmetricMatrix<T> profile_k1(const SampleSet<T>& sample,
                              const SymmetricMatrix<T>& k2) {
  if (sample.n() * sample.m2() < sample.m1()) {
    throw SingularMatrix("profile_k1: n*m2 < m1, scatter is rank deficient");
  }
  const T scale = T(static_cast<long>(sample.n() * sample.m2()));
  const auto scatter = row_scatter(sample, k2);
  return inverse(SymmetricMatrix<T>::symmetrize(scatter.full() / scale));
}

template <typename T>
SymmetricMatrix<T> profile_k2(const SampleSet<T>& sample,
                              const SymmetricMatrix<T>& k1) {
  if (sample.n() * sample.m1() < sample.m2()) {
    throw SingularMatrix("profile_k2: n*m1 < m2, scatter is rank deficient");
  }
  const T scale = T(static_cast<long>(sample.n() * sample.m1()));
  const auto scatter = column_scatter(sample, k1);
  return inverse(SymmetricMatrix<T>::symmetrize(scatter.full() / scale));
}

template SymmetricMatrix<double> row_scatter(const SampleSet<double>&, const SymmetricMatrix<double>&);
template SymmetricMatrix<Rational> row_scatter(const SampleSet<Rational>&, const SymmetricMatrix<Rational>&);
template SymmetricMatrix<double> column_scatter(const SampleSet<double>&, const SymmetricMatrix<double>&);
template SymmetricMatrix<Rational> column_scatter(const SampleSet<Rational>&, const SymmetricMatrix<Rational>&);
template SymmetricMatrix<double> profile_k1(const SampleSet<double>&, const SymmetricMatrix<double>&);
template SymmetricMatrix<Rational> profile_k1(const SampleSet<Rational>&, const SymmetricMatrix<Rational>&);
template SymmetricMatrix<double> profile_k2(const SampleSet<double>&, const SymmetricMatrix<double>&);
template SymmetricMatrix<Rational> profile_k2(const SampleSet<Rational>&, const SymmetricMatrix<Rational>&);

namespace {

double scatter_log_det(const SampleSet<double>& sample,
                       const SymmetricMatrix<double>& k2) {
  const auto scatter = row_scatter(sample, k2);
  if (!cholesky(scatter)) {
    throw SingularMatrix("sum_i Y_i K Y_i^T is singular");
  }
  return log_det_pd(scatter);
}

}  // namespace

double g_objective(const SampleSet<double>& sample,
                   const SymmetricMatrix<double>& k2) {
  if (k2.dim() != sample.m2()) throw DimensionMismatch("g_objective: K must be m2 x m2");
  const double ld_k = log_det_pd(k2);
  return static_cast<double>(sample.m2()) * scatter_log_det(sample, k2) -
         static_cast<double>(sample.m1()) * ld_k;
}

double profile_loglik(const SampleSet<double>& sample,
                      const SymmetricMatrix<double>& k2) {
  const double n = static_cast<double>(sample.n());
  const double m1 = static_cast<double>(sample.m1());
  const double m2 = static_cast<double>(sample.m2());
  const double ld_scatter = scatter_log_det(sample, k2) - m1 * std::log(n * m2);
  return -n * m2 * ld_scatter + n * m1 * log_det_pd(k2) - n * m1 * m2;
}

ThresholdBounds thresholds(long m1, long m2) {
  if (m1 < 1 || m2 < 1) throw std::invalid_argument("thresholds: m1, m2 must be >= 1");
  ThresholdBounds b;
  Rational r12(m1, m2);
  Rational r21(m2, m1);
  r12.canonicalize();
  r21.canonicalize();
  b.lower = r12 > r21 ? r12 : r21;
  const Rational s = r12 + r21;
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  b.upper = fl.get_si() + 1;
  return b;
}

SampleSet<double> sample_matrix_normal(const Matrix<double>& a,
                                       const Matrix<double>& b, std::size_t n,
                                       std::uint64_t seed) {
  if (!a.is_square() || !b.is_square()) {
    throw DimensionMismatch("sample_matrix_normal: A and B must be square");
  }
  SeededRng rng(seed);
  const std::size_t m1 = a.rows();
  const std::size_t m2 = b.rows();
  std::vector<Matrix<double>> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix<double> z(m1, m2);
    for (std::size_t c = 0; c < m2; ++c)
      for (std::size_t r = 0; r < m1; ++r) z(r, c) = rng.normal();
    data.push_back(a * z * b);
  }
  return SampleSet<double>(m1, m2, std::move(data));
}

template <typename T>
SampleSet<T> read_sample_set(std::istream& in) {
  long m1 = 0, m2 = 0, n = 0;
  if (!(in >> m1 >> m2 >> n)) throw ParseError("missing sample header 'm1 m2 n'");
  if (m1 <= 0 || m2 <= 0 || n <= 0) throw ParseError("sample dims must be positive");
  const Matrix<T> y = read_matrix<T>(in);
  if (y.rows() != static_cast<std::size_t>(m1) ||
      y.cols() != static_cast<std::size_t>(n * m2)) {
    throw ParseError("sample matrix must be m1 x (n*m2) = " + std::to_string(m1) +
                     "x" + std::to_string(n * m2));
  }
  return SampleSet<T>::from_concatenated(static_cast<std::size_t>(m2), y);
}

template <typename T>
void write_sample_set(std::ostream& out, const SampleSet<T>& sample) {
  out << sample.m1() << ' ' << sample.m2() << ' ' << sample.n() << '\n';
  write_matrix(out, sample.concatenated());
}

template SampleSet<double> read_sample_set(std::istream&);
template SampleSet<Rational> read_sample_set(std::istream&);
template void write_sample_set(std::ostream&, const SampleSet<double>&);
template void write_sample_set(std::ostream&, const SampleSet<Rational>&);

}  // namespace kronmle
