#include "kronmle/solvers.hpp"

#include <cmath>

#include "kronmle/canonical.hpp"
#include "kronmle/matrix_io.hpp"

namespace kronmle {

std::string to_string(EstimateMethod m) {
  return m == EstimateMethod::Exact ? "exact" : "flipflop";
}

void normalize_det_one(SymmetricMatrix<double>& k1, SymmetricMatrix<double>& k2) {
  const double scale = std::exp(log_det_pd(k2) / static_cast<double>(k2.dim()));
  k2 = k2.scaled(1.0 / scale);
  k1 = k1.scaled(scale);
}

KroneckerEstimate<double> normalized(const KroneckerEstimate<Rational>& exact) {
  KroneckerEstimate<double> out;
  out.k1 = symmetric_cast<double>(exact.k1);
  out.k2 = symmetric_cast<double>(exact.k2);
  normalize_det_one(out.k1, out.k2);
  out.k2_det = 1.0;
  out.loglik = exact.loglik;
  out.method = exact.method;
  out.iterations = exact.iterations;
  out.converged = exact.converged;
  out.loglik_trace = exact.loglik_trace;
  return out;
}

template <typename T>
KroneckerEstimate<T> exact_mle_k1(const SampleSet<T>& sample) {
  if (sample.k() != 1) {
    throw WrongRegime("exact_mle_k1 needs n*m2 = m1 + 1, got k = " +
                      std::to_string(sample.k()));
  }
  if (sample.n() < sample.m2()) {
    throw MleNotExists("MLE does not exist for k = 1 when n < m2 (n = " +
                       std::to_string(sample.n()) + ", m2 = " +
                       std::to_string(sample.m2()) + ")");
  }
  const CanonicalForm<T> cf = canonicalize(sample);

  // v = D (the single column), split into n blocks v_i of length m2.
  SymmetricMatrix<T> k2(sample.m2());
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const Matrix<T> v = cf.d_vector(i, 0);
    for (std::size_t p = 0; p < sample.m2(); ++p)
      for (std::size_t q = p; q < sample.m2(); ++q)
        k2.set(p, q, k2(p, q) + v(p, 0) * v(q, 0));
  }
  if (!is_positive_definite(k2)) {
    throw MleNotExists("sum_i v_i v_i^T is not positive definite; MLE does not exist");
  }

  KroneckerEstimate<T> est;
  est.method = EstimateMethod::Exact;
  est.k1 = profile_k1(sample, k2);
  est.k2 = std::move(k2);
  if constexpr (is_exact_v<T>) {
    est.k2_det = det(est.k2.full());
    est.loglik = kron_loglik(sample_cast<double>(sample),
                             symmetric_cast<double>(est.k1),
                             symmetric_cast<double>(est.k2));
  } else {
    normalize_det_one(est.k1, est.k2);
    est.k2_det = 1.0;
    est.loglik = kron_loglik(sample, est.k1, est.k2);
  }
  return est;
}

template KroneckerEstimate<double> exact_mle_k1(const SampleSet<double>&);
template KroneckerEstimate<Rational> exact_mle_k1(const SampleSet<Rational>&);

KroneckerEstimate<double> flipflop(const SampleSet<double>& sample,
                                   const SymmetricMatrix<double>& init_k2,
                                   const FlipFlopOptions& options) {
  if (init_k2.dim() != sample.m2()) throw DimensionMismatch("flipflop: init K2 must be m2 x m2");
  if (!cholesky(init_k2)) throw NotPositiveDefinite("flipflop: init K2 is not positive definite");

  SymmetricMatrix<double> k1(sample.m1());
  SymmetricMatrix<double> k2 = init_k2;
  normalize_det_one(k1, k2);

  KroneckerEstimate<double> est;
  est.method = EstimateMethod::FlipFlop;
  est.converged = false;
  for (std::size_t sweep = 1; sweep <= options.max_iter; ++sweep) {
    k1 = profile_k1(sample, k2);
    SymmetricMatrix<double> next = profile_k2(sample, k1);
    normalize_det_one(k1, next);

    double change = 0.0;
    for (std::size_t p = 0; p < next.dim(); ++p)
      for (std::size_t q = p; q < next.dim(); ++q)
        change = std::max(change, std::fabs(next(p, q) - k2(p, q)));
    k2 = std::move(next);

    const double ll = kron_loglik(sample, k1, k2);
    est.loglik_trace.push_back(ll);
    est.iterations = sweep;
    if (options.observer) options.observer(sweep, k1, k2, ll);
    if (change < options.tol) {
      est.converged = true;
      break;
    }
  }
  est.k1 = std::move(k1);
  est.k2 = std::move(k2);
  est.k2_det = 1.0;
  est.loglik = est.loglik_trace.empty() ? kron_loglik(sample, est.k1, est.k2)
                                        : est.loglik_trace.back();
  return est;
}

KroneckerEstimate<double> mle(const SampleSet<double>& sample, const MleConfig& config) {
  if (sample.k() == 1) return exact_mle_k1(sample);
  return flipflop(sample, SymmetricMatrix<double>::identity(sample.m2()), config.flipflop);
}

template <typename T>
void write_estimate(std::ostream& out, const KroneckerEstimate<T>& est) {
  out << est.k1.dim() << ' ' << est.k2.dim() << ' ' << to_string(est.method) << ' '
      << est.iterations << ' ' << (est.converged ? 1 : 0) << ' '
      << to_string(est.loglik) << '\n';
  write_matrix(out, est.k1.full());
  write_matrix(out, est.k2.full());
}

template void write_estimate(std::ostream&, const KroneckerEstimate<double>&);
template void write_estimate(std::ostream&, const KroneckerEstimate<Rational>&);

KroneckerEstimate<double> read_estimate(std::istream& in) {
  long m1 = 0, m2 = 0;
  std::string method;
  std::size_t iterations = 0;
  int converged = 0;
  std::string loglik;
  if (!(in >> m1 >> m2 >> method >> iterations >> converged >> loglik)) {
    throw ParseError("missing estimate header 'm1 m2 method iterations converged loglik'");
  }
  KroneckerEstimate<double> est;
  if (method == "exact") {
    est.method = EstimateMethod::Exact;
  } else if (method == "flipflop") {
    est.method = EstimateMethod::FlipFlop;
  } else {
    throw ParseError("unknown estimate method '" + method + "'");
  }
  est.iterations = iterations;
  est.converged = converged != 0;
  est.loglik = std::stod(loglik);
  est.k1 = SymmetricMatrix<double>::symmetrize(read_matrix<double>(in));
  est.k2 = SymmetricMatrix<double>::symmetrize(read_matrix<double>(in));
  if (est.k1.dim() != static_cast<std::size_t>(m1) ||
      est.k2.dim() != static_cast<std::size_t>(m2)) {
    throw ParseError("estimate factor dims do not match header");
  }
  est.k2_det = det(est.k2.full());
  return est;
}

}  // namespace kronmle
