#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "kronmle/matrix.hpp"
#include "kronmle/model.hpp"

namespace kronmle {

enum class EstimateMethod { Exact, FlipFlop };

std::string to_string(EstimateMethod m);

// MLE factors of K2 kron K1. Float estimates are normalized to det(K2) = 1
// with K1 carrying the scale. Exact (Rational) estimates keep the
// unnormalized K2, whose determinant is recorded in k2_det.
template <typename T>
struct KroneckerEstimate {
  SymmetricMatrix<T> k1;
  SymmetricMatrix<T> k2;
  T k2_det = T(1);
  double loglik = 0.0;
  EstimateMethod method = EstimateMethod::Exact;
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<double> loglik_trace;  // one entry per flip-flop sweep
};

// Rescales (K1, K2) -> (c K1, K2 / c) with c = det(K2)^{1/m2}.
void normalize_det_one(SymmetricMatrix<double>& k1, SymmetricMatrix<double>& k2);

KroneckerEstimate<double> normalized(const KroneckerEstimate<Rational>& exact);

// Closed-form MLE when n m2 = m1 + 1: K2 = sum_i v_i v_i^T where
// v^T = [y^T Y_*^{-T}, -1] is cut into n blocks of length m2, and K1 is the
// profile maximizer at K2. Throws WrongRegime when k != 1, MleNotExists when
// n < m2 or sum_i v_i v_i^T is not positive definite, DegenerateData when
// Y_* is singular. Over Rational every step is exact.
template <typename T>
KroneckerEstimate<T> exact_mle_k1(const SampleSet<T>& sample);

struct FlipFlopOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  // Called after every sweep with the det-normalized factors.
  std::function<void(std::size_t sweep, const SymmetricMatrix<double>& k1,
                     const SymmetricMatrix<double>& k2, double loglik)>
      observer;
};

// Block-coordinate ascent alternating the two profile maximizers. Stops when
// the max-abs change of the det-normalized K2 drops below tol; hitting
// max_iter is reported through `converged`, not thrown.
KroneckerEstimate<double> flipflop(const SampleSet<double>& sample,
                                   const SymmetricMatrix<double>& init_k2,
                                   const FlipFlopOptions& options = {});

struct MleConfig {
  FlipFlopOptions flipflop;
};

// exact_mle_k1 when k = 1, otherwise flip-flop from K2 = I.
KroneckerEstimate<double> mle(const SampleSet<double>& sample,
                              const MleConfig& config = {});

// Header "m1 m2 method iterations converged loglik", then K1 and K2.
template <typename T>
void write_estimate(std::ostream& out, const KroneckerEstimate<T>& est);

KroneckerEstimate<double> read_estimate(std::istream& in);

}  // namespace kronmle
