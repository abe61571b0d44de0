#include <doctest.h>

#include <cmath>
#include <sstream>

#include "kronmle/canonical.hpp"
#include "kronmle/errors.hpp"
#include "kronmle/solvers.hpp"
#include "support/test_support.hpp"

using namespace kronmle;
using namespace kronmle::testing;
using Q = Rational;
using MQ = Matrix<Rational>;
using SQ = SymmetricMatrix<Rational>;
using MD = Matrix<double>;
using SD = SymmetricMatrix<double>;

namespace {

SampleSet<Q> hand_sample() {
  return SampleSet<Q>::from_concatenated(
      2, MQ{{Q(1), Q(0), Q(0), Q(1)}, {Q(0), Q(1), Q(0), Q(0)}, {Q(0), Q(0), Q(1), Q(0)}});
}

// Moves the scale of (k1, k2) so that det k2 = 1.
std::pair<SD, SD> det_one(SD k1, SD k2) {
  normalize_det_one(k1, k2);
  return {k1, k2};
}

}  // namespace

TEST_CASE("exact k = 1 hand example") {
  const auto est = exact_mle_k1(hand_sample());
  CHECK(est.method == EstimateMethod::Exact);
  CHECK(est.k2 == SQ::identity(2));
  CHECK(est.k2_det == 1);
  CHECK(est.k1.full() == MQ::diagonal({Q(2), Q(4), Q(4)}));
  CHECK(row_scatter(hand_sample(), est.k2).full() == MQ::diagonal({Q(2), Q(1), Q(1)}));
}

TEST_CASE("exact k = 1 scalar case") {
  for (long c : {0L, 3L, -5L}) {
    const SampleSet<Q> s(1, 1, {MQ{{Q(1)}}, MQ{{Q(c)}}});
    const auto est = exact_mle_k1(s);
    CHECK(est.k2(0, 0) == Q(c * c + 1));
    // K1 = (Y K2 Y^T / 2)^{-1} with Y = [1 | c].
    CHECK(est.k1(0, 0) == Q(2) / (Q(c * c + 1) * Q(c * c + 1)));
  }
}

TEST_CASE("exact k = 1 regime and existence errors") {
  SeededRng rng(61);
  CHECK_THROWS_AS(exact_mle_k1(gaussian_sample(rng, 5, 3, 2)), MleNotExists);
  CHECK_THROWS_AS(exact_mle_k1(gaussian_sample(rng, 4, 3, 2)), WrongRegime);
  CHECK_THROWS_AS(exact_mle_k1(gaussian_sample(rng, 3, 2, 1)), WrongRegime);
  MQ y(3, 4);
  y(0, 0) = 1;
  y(1, 1) = 1;
  y(2, 3) = 1;
  CHECK_THROWS_AS(exact_mle_k1(SampleSet<Q>::from_concatenated(2, y)), DegenerateData);
}

TEST_CASE("exact k = 1 existence follows n >= m2") {
  SeededRng rng(62);
  for (std::size_t m2 = 1; m2 <= 4; ++m2) {
    for (std::size_t n = 1; n <= 5; ++n) {
      if (n * m2 < 2) continue;
      const std::size_t m1 = n * m2 - 1;
      const auto sample = gaussian_sample(rng, m1, m2, n);
      if (n >= m2) {
        const auto est = exact_mle_k1(sample);
        CHECK(is_positive_definite(est.k1));
        CHECK(is_positive_definite(est.k2));
      } else {
        CHECK_THROWS_AS(exact_mle_k1(sample), MleNotExists);
      }
    }
  }
}

TEST_CASE("exact k = 1 output is exactly rational and stationary") {
  SeededRng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m2 = 2 + trial % 2, n = m2 + trial % 2, m1 = n * m2 - 1;
    std::vector<MQ> data;
    for (std::size_t i = 0; i < n; ++i) data.push_back(random_int_matrix<Q>(rng, m1, m2, -9, 9));
    const SampleSet<Q> sample(m1, m2, data);
    const auto est = exact_mle_k1(sample);
    CHECK(est.k2_det == det(est.k2.full()));
    // Both profile equations hold exactly.
    const Q nm2(static_cast<long>(n * m2)), nm1(static_cast<long>(n * m1));
    CHECK(nm2 * inverse(est.k1.full()) == row_scatter(sample, est.k2).full());
    CHECK(nm1 * inverse(est.k2.full()) == column_scatter(sample, est.k1).full());
  }
}

TEST_CASE("exact k = 1 is a critical point of the reduced objective") {
  SeededRng rng(64);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = m2 + 1, m1 = n * m2 - 1;
    const auto sample = gaussian_sample(rng, m1, m2, n);
    const auto est = exact_mle_k1(sample);
    const auto grad = reduced_gradient(canonicalize(sample), inverse(est.k2.full()));
    CHECK(max_abs(grad) <= 1e-8);
  }
}

TEST_CASE("double and rational exact engines agree") {
  SeededRng rng(65);
  std::vector<MQ> data;
  for (int i = 0; i < 3; ++i) data.push_back(random_int_matrix<Q>(rng, 5, 2, -9, 9));
  const SampleSet<Q> sample(5, 2, data);
  const auto exact = normalized(exact_mle_k1(sample));
  const auto approx = exact_mle_k1(sample_cast<double>(sample));
  CHECK(std::fabs(det(approx.k2.full()) - 1.0) <= 1e-9);
  CHECK(max_abs_diff(exact.k2, approx.k2) <= 1e-10);
  CHECK(max_abs_diff(exact.k1, approx.k1) <= 1e-9 * max_abs(exact.k1.full()));
}

TEST_CASE("flip-flop starting at the exact solution does not move") {
  SeededRng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = m2 + trial % 2, m1 = n * m2 - 1;
    const auto sample = gaussian_sample(rng, m1, m2, n);
    const auto exact = normalized(exact_mle_k1(sample_cast<Q>(sample)));
    FlipFlopOptions opts;
    opts.max_iter = 1;
    const auto one = flipflop(sample, exact.k2, opts);
    CHECK(one.iterations == 1);
    // Two inversions per sweep lose roughly cond(K2) digits in double.
    const double cond = max_abs(exact.k2.full()) * max_abs(inverse(exact.k2.full()));
    CAPTURE(cond);
    CHECK(max_abs_diff(one.k2, exact.k2) < 1e-12 * std::max(1.0, cond));
  }
}

TEST_CASE("an exact sweep reproduces the exact solution up to scale") {
  SeededRng rng(66);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = m2 + trial % 2, m1 = n * m2 - 1;
    const auto sample = sample_cast<Q>(gaussian_sample(rng, m1, m2, n));
    const auto exact = exact_mle_k1(sample);
    const SQ k2 = profile_k2(sample, profile_k1(sample, exact.k2));
    const Q ratio = k2(0, 0) / exact.k2(0, 0);
    CHECK(k2.full() == ratio * exact.k2.full());
  }
}

TEST_CASE("flip-flop log-likelihood never decreases") {
  SeededRng rng(67);
  for (int trial = 0; trial < 8; ++trial) {
    const auto sample = gaussian_sample(rng, 3 + trial % 3, 2 + trial % 2, 3);
    const auto est = flipflop(sample, SD::identity(sample.m2()));
    REQUIRE(est.loglik_trace.size() == est.iterations);
    for (std::size_t i = 1; i < est.loglik_trace.size(); ++i)
      CHECK(est.loglik_trace[i] >= est.loglik_trace[i - 1] - 1e-10);
    CHECK(est.loglik == doctest::Approx(kron_loglik(sample, est.k1, est.k2)));
    CHECK(std::fabs(det(est.k2.full()) - 1.0) <= 1e-9);
  }
}

TEST_CASE("flip-flop reports non-convergence") {
  SeededRng rng(68);
  const auto sample = gaussian_sample(rng, 4, 3, 3);
  FlipFlopOptions opts;
  opts.max_iter = 2;
  opts.tol = 1e-300;
  std::size_t calls = 0;
  opts.observer = [&](std::size_t, const SD&, const SD&, double) { ++calls; };
  const auto est = flipflop(sample, SD::identity(3), opts);
  CHECK_FALSE(est.converged);
  CHECK(est.iterations == 2);
  CHECK(calls == 2);
  CHECK_THROWS_AS(flipflop(sample, SD{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 1.0}}),
                  NotPositiveDefinite);
}

TEST_CASE("dispatch records the method") {
  SeededRng rng(69);
  const auto k1 = mle(gaussian_sample(rng, 3, 2, 2));
  CHECK(k1.method == EstimateMethod::Exact);
  CHECK(to_string(k1.method) == "exact");
  const auto k2 = mle(gaussian_sample(rng, 4, 2, 3));
  CHECK(k2.method == EstimateMethod::FlipFlop);
  CHECK(to_string(k2.method) == "flipflop");
}

TEST_CASE("exact and flip-flop engines agree for k = 1") {
  SeededRng rng(70);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = m2 + trial % 2, m1 = n * m2 - 1;
    const auto sample = gaussian_sample(rng, m1, m2, n);
    const auto exact = exact_mle_k1(sample);
    const auto ff = flipflop(sample, SD::identity(m2));
    REQUIRE(ff.converged);
    CHECK(max_abs_diff(exact.k2, ff.k2) <= 1e-6);
    CHECK(max_abs_diff(exact.k1, ff.k1) <= 1e-6 * max_abs(exact.k1.full()));
    CHECK(ff.loglik == doctest::Approx(exact.loglik).epsilon(1e-9));
  }
}

TEST_CASE("MLE is equivariant under the group action") {
  SeededRng rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    // k = 1 with n >= m2, or n at the upper bound of the uniqueness threshold.
    const std::size_t m2 = 2 + trial % 2;
    std::size_t m1, n;
    if (trial % 2 == 0) {
      n = m2 + (trial / 2) % 2;
      m1 = n * m2 - 1;
    } else {
      m1 = 2 + (trial / 2) % 4;
      n = static_cast<std::size_t>(thresholds(m1, m2).upper);
    }
    const auto sample = gaussian_sample(rng, m1, m2, n);
    const MD a = random_nonsingular(rng, m1);
    const MD b = random_nonsingular(rng, m2);
    std::vector<MD> moved;
    for (const auto& y : sample.data()) moved.push_back(a * y * b.transpose());
    const auto base = mle(sample);
    const auto est = mle(SampleSet<double>(m1, m2, moved));
    const MD ai = inverse(a), bi = inverse(b);
    const auto [k1, k2] = det_one(SD::symmetrize(ai.transpose() * base.k1.full() * ai),
                                  SD::symmetrize(bi.transpose() * base.k2.full() * bi));
    CHECK(max_abs_diff(est.k2, k2) <= 1e-6 * std::max(1.0, max_abs(k2.full())));
    CHECK(max_abs_diff(est.k1, k1) <= 1e-6 * std::max(1.0, max_abs(k1.full())));
  }
}

TEST_CASE("normalization moves scale into K1") {
  SD k1{{2.0, 0.0}, {0.0, 2.0}};
  SD k2{{4.0, 0.0}, {0.0, 4.0}};
  normalize_det_one(k1, k2);
  CHECK(k2(0, 0) == doctest::Approx(1.0));
  CHECK(k1(0, 0) == doctest::Approx(8.0));
}

TEST_CASE("estimate file round trip") {
  SeededRng rng(72);
  const auto est = mle(gaussian_sample(rng, 4, 2, 3));
  std::stringstream buf;
  write_estimate(buf, est);
  std::string header;
  std::getline(buf, header);
  CHECK(header.rfind("4 2 flipflop ", 0) == 0);
  buf.seekg(0);
  const auto back = read_estimate(buf);
  CHECK(back.method == est.method);
  CHECK(back.iterations == est.iterations);
  CHECK(back.converged == est.converged);
  CHECK(back.loglik == est.loglik);
  CHECK(back.k1 == est.k1);
  CHECK(back.k2 == est.k2);
}
