#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kronmle/groebner.hpp"
#include "kronmle/model.hpp"

namespace kronmle {

// n integer m1 x 2 matrices with entries uniform on {0, ..., 16}, filled
// matrix by matrix in row-major order.
SampleSet<Rational> ml_degree_sample(std::size_t m1, std::size_t n, std::uint64_t seed);

// Likelihood equations for m2 = 2 on the chart K = [[1, k12], [k12, k22]].
struct LikelihoodSystem {
  RingPtr ring;                      // k12, k22 (grevlex)
  Polynomial g1;                     // det sum_i Y_i K Y_i^T
  Polynomial g2;                     // det K
  std::vector<Polynomial> equations; // 2 g2 d_e g1 - m1 g1 d_e g2, e = k22, k12
  PolyIdeal saturated;               // equations plus y g1 g2 k22 - 1
};

LikelihoodSystem likelihood_system_m2_2(const SampleSet<Rational>& sample);

// The saturated ideal for the seeded random sample.
PolyIdeal likelihood_equations_m2_2(std::size_t m1, std::size_t n, std::uint64_t seed);

struct MlDegreeResult {
  std::size_t m1 = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  // Zero when the saturated ideal is positive-dimensional or the unit ideal.
  std::optional<std::size_t> degree;  // empty on timeout
  bool zero_dimensional = false;
  bool timed_out = false;
  std::size_t basis_size = 0;
  double seconds = 0.0;
};

MlDegreeResult ml_degree(std::size_t m1, std::size_t n, std::uint64_t seed,
                         std::size_t pair_budget = kDefaultPairBudget);

enum class MultiplicityCase { One, Two };

std::string to_string(MultiplicityCase c);
MultiplicityCase parse_multiplicity_case(const std::string& text);

// Numerators of the two reduced rational equations and y * den1 * den2 - 1.
// Case one lives in [y, t, b] and needs m2 > 2, k >= 2; case two lives in
// [y, b, c] and needs m2 = 2, k >= 2. Throws WrongRegime otherwise.
PolyIdeal prop43_system(long m2, long k, MultiplicityCase which);

struct QuadraticInfo {
  Polynomial poly;        // numerator after cancelling with the denominator
  Polynomial denominator; // primitive, positive leading coefficient
  Rational discriminant;
  std::vector<double> real_roots;
};

// The b = 0 branch of the equation not divisible by b (e2 in case one, e3 in
// case two), reduced to lowest terms.
QuadraticInfo b0_quadratic(long m2, long k, MultiplicityCase which);

struct MultiplicityResult {
  std::optional<std::size_t> count;  // empty on timeout or positive dimension
  std::size_t bound = 0;             // 5 for case one, 4 for case two
  bool at_least_two = false;
  bool within_bound = false;
  bool timed_out = false;
};

MultiplicityResult ml_multiplicity_prop43(long m2, long k, MultiplicityCase which,
                                          std::size_t pair_budget = kDefaultPairBudget);

}  // namespace kronmle
