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

namespace {

const MQ kExampleC{{Q(1), Q(2)}, {Q(3), Q(4)}, {Q(5), Q(6)}, {Q(7), Q(8)}};
const SQ kExampleK{{Q(3), Q(1)}, {Q(1), Q(3)}};

SampleSet<Q> from_c(std::size_t m2, const MQ& c) {
  const std::size_t m1 = c.rows();
  const MQ parts[] = {MQ::identity(m1), c};
  return SampleSet<Q>::from_concatenated(m2, hstack<Q>(parts));
}

// D^T (I_n kron S) D by explicit matrix products.
template <typename T>
Matrix<T> direct_trace_form(const CanonicalForm<T>& cf, const Matrix<T>& s) {
  return cf.d.transpose() * kron(Matrix<T>::identity(cf.n), s) * cf.d;
}

}  // namespace

TEST_CASE("data already in canonical form keeps C") {
  const auto cf = canonicalize(from_c(2, kExampleC));
  CHECK(cf.k == 2);
  CHECK(cf.c == kExampleC);
  CHECK(cf.det_ystar == 1);
  const MQ dt = cf.d.transpose();
  CHECK(dt.block(0, 0, 2, 4) == kExampleC.transpose());
  CHECK(dt.block(0, 4, 2, 2) == -MQ::identity(2));
}

TEST_CASE("worked example trace form") {
  const auto cf = canonical_from_c<Q>(2, 3, kExampleC);
  const MQ expected{{Q(179, 8), Q(207, 8)}, {Q(207, 8), Q(251, 8)}};
  CHECK(Q(179, 8) == parse_rational("22.375"));
  CHECK(trace_form(cf, inverse(kExampleK)) == expected);
  CHECK(direct_trace_form(cf, inverse(kExampleK.full())) == expected);
}

TEST_CASE("worked example determinant reduction") {
  const auto cf = canonical_from_c<Q>(2, 3, kExampleC);
  const auto r = det_reduction_check(cf, kExampleK);
  CHECK(r.lhs == 16640);
  CHECK(r.rhs == 16640);
  CHECK(r.det_k_power == 512);
  CHECK(r.inner_det == Q(65, 2));
  // The 4 x 4 matrix itself through an independent determinant.
  const MQ y = cf.canonical_data();
  CHECK(leibniz_det(y * kron(MQ::identity(3), kExampleK.full()) * y.transpose()) == 16640);
}

TEST_CASE("k = 1 hand example") {
  const MQ c{{Q(1)}, {Q(0)}, {Q(0)}};
  const auto cf = canonicalize(from_c(2, c));
  CHECK(cf.k == 1);
  CHECK(cf.d == MQ{{Q(1)}, {Q(0)}, {Q(0)}, {Q(-1)}});
  CHECK(cf.d_vector(0, 0) == MQ{{Q(1)}, {Q(0)}});
  CHECK(cf.d_vector(1, 0) == MQ{{Q(0)}, {Q(-1)}});

  const SQ k{{Q(2), Q(1)}, {Q(1), Q(5)}};
  const auto r = det_reduction_check(cf, k);
  CHECK(r.lhs == r.rhs);
  const MQ kinv = inverse(k.full());
  const Q scalar = (cf.d_vector(0, 0).transpose() * kinv * cf.d_vector(0, 0))(0, 0) +
                   (cf.d_vector(1, 0).transpose() * kinv * cf.d_vector(1, 0))(0, 0);
  CHECK(r.rhs == det(k.full()) * det(k.full()) * scalar);
}

TEST_CASE("[I | C] D vanishes") {
  SeededRng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = 2 + trial % 2;
    const std::size_t m1 = n * m2 - 1 - trial % 2;
    const auto cf = canonical_from_c<Q>(m2, n, random_int_matrix<Q>(rng, m1, n * m2 - m1, -8, 8));
    CHECK(cf.canonical_data() * cf.d == MQ(m1, cf.k));
  }
}

TEST_CASE("identity K reduces to the Weinstein-Aronszajn instance") {
  SeededRng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const MQ c = random_int_matrix<Q>(rng, 5, 3, -8, 8);
    const auto cf = canonical_from_c<Q>(2, 4, c);
    const auto r = det_reduction_check(cf, SQ::identity(2));
    CHECK(r.lhs == det(MQ::identity(5) + c * c.transpose()));
    CHECK(r.rhs == det(MQ::identity(3) + c.transpose() * c));
    CHECK(r.lhs == r.rhs);
  }
}

TEST_CASE("determinant reduction on random exact instances") {
  SeededRng rng(53);
  int passed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [m1, m2, n, k] = random_reduction_shape(rng);
    REQUIRE(m1 >= 1);
    REQUIRE(m1 <= 10);
    const MQ c = random_int_matrix<Q>(rng, m1, k, -8, 8);
    const auto cf = canonical_from_c<Q>(m2, n, c);
    const SQ kk = random_pd<Q>(rng, m2);
    const auto r = det_reduction_check(cf, kk);
    Q power = 1;
    for (std::size_t i = 0; i < n; ++i) power *= det(kk.full());
    CHECK(r.det_k_power == power);
    CHECK(r.inner == direct_trace_form(cf, inverse(kk.full())));
    if (r.lhs == r.rhs) ++passed; else FAIL_CHECK("trial " << trial);
  }
  CHECK(passed == 200);
}

TEST_CASE("trace form equals the direct product for random Sigma") {
  SeededRng rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = 3;
    const std::size_t m1 = n * m2 - 1 - trial % 3;
    const auto cf = canonical_from_c<Q>(m2, n, random_int_matrix<Q>(rng, m1, n * m2 - m1, -8, 8));
    const SQ sigma = SQ(random_pd<Q>(rng, m2).full() / Q(5));
    CHECK(trace_form(cf, sigma) == direct_trace_form(cf, sigma.full()));
    CHECK(trace_form(cf, SQ::identity(m2)) == cf.d.transpose() * cf.d);
  }
}

TEST_CASE("D_ab grid equals the sum of d_i* d_i*^T") {
  SeededRng rng(55);
  const auto cf = canonical_from_c<Q>(3, 3, random_int_matrix<Q>(rng, 6, 3, -8, 8));
  MQ sum(cf.m2 * cf.k, cf.m2 * cf.k);
  for (std::size_t i = 0; i < cf.n; ++i) {
    MQ di(cf.m2 * cf.k, 1);
    for (std::size_t j = 0; j < cf.k; ++j)
      for (std::size_t r = 0; r < cf.m2; ++r) di(j * cf.m2 + r, 0) = cf.d_vector(i, j)(r, 0);
    sum = sum + di * di.transpose();
  }
  CHECK(cf.stacked_dab() == sum);
  for (std::size_t a = 0; a < cf.k; ++a)
    for (std::size_t b = 0; b < cf.k; ++b) CHECK(cf.block(a, b) == cf.block(b, a).transpose());
}

TEST_CASE("canonicalize removes the left block") {
  SeededRng rng(56);
  const MQ c = random_int_matrix<Q>(rng, 4, 2, -8, 8);
  MQ a = random_int_matrix<Q>(rng, 4, 4, -3, 3);
  while (det(a) == 0) a = random_int_matrix<Q>(rng, 4, 4, -3, 3);
  const MQ y = a * from_c(2, c).concatenated();
  const auto cf = canonicalize(SampleSet<Q>::from_concatenated(2, y));
  CHECK(cf.c == c);
  CHECK(cf.det_ystar == det(a));
}

TEST_CASE("canonicalize error cases") {
  MQ y(3, 4);
  y(0, 0) = 1;
  y(1, 1) = 1;  // third column of Y_* is zero
  y(2, 3) = 1;
  CHECK_THROWS_AS(canonicalize(SampleSet<Q>::from_concatenated(2, y)), DegenerateData);
  CHECK_THROWS_AS(canonicalize(SampleSet<Q>::from_concatenated(2, MQ(4, 4))), NonPositiveK);
  CHECK_THROWS_AS(canonicalize(SampleSet<Q>::from_concatenated(2, MQ(5, 4))), NonPositiveK);
}

TEST_CASE("reduced gradient matches central differences") {
  SeededRng rng(57);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m2 = 2 + trial % 3, n = 3;
    const std::size_t k = 1 + trial % 3;
    const auto sample = gaussian_sample(rng, n * m2 - k, m2, n);
    const auto cf = canonicalize(sample);
    const Matrix<double> sigma = random_pd_gaussian(rng, m2).full();
    const Matrix<double> grad = reduced_gradient(cf, sigma);
    const double h = 1e-5;
    for (std::size_t i = 0; i < m2; ++i) {
      for (std::size_t j = 0; j < m2; ++j) {
        Matrix<double> plus = sigma, minus = sigma;
        plus(i, j) += h;
        minus(i, j) -= h;
        const double fd =
            (reduced_objective(cf, plus) - reduced_objective(cf, minus)) / (2 * h);
        CHECK(std::fabs(fd - grad(i, j)) <= 1e-6 * std::max(1.0, std::fabs(grad(i, j))));
      }
    }
  }
}

TEST_CASE("permutation-sum gradient equals the matrix formula") {
  SeededRng rng(58);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t m2 = 2 + trial % 2, n = 3, k = 1 + trial % 4;
    const auto cf = canonicalize(gaussian_sample(rng, n * m2 - k, m2, n));
    const SymmetricMatrix<double> sigma = random_pd_gaussian(rng, m2);
    const auto a = reduced_gradient(cf, sigma.full());
    const auto b = reduced_gradient_permutation(cf, sigma);
    CHECK(max_abs_diff(a, b) <= 1e-9 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("reduced objective agrees with g up to a constant") {
  SeededRng rng(59);
  const auto sample = gaussian_sample(rng, 5, 2, 3);
  const auto cf = canonicalize(sample);
  const auto canon = SampleSet<double>::from_concatenated(2, cf.canonical_data());
  const SymmetricMatrix<double> k0 = random_pd_gaussian(rng, 2);
  const double offset = g_objective(canon, k0) - reduced_objective(cf, inverse(k0.full()));
  for (int trial = 0; trial < 10; ++trial) {
    const SymmetricMatrix<double> k = random_pd_gaussian(rng, 2);
    CHECK(g_objective(canon, k) - reduced_objective(cf, inverse(k.full())) ==
          doctest::Approx(offset));
  }
  CHECK(offset == doctest::Approx(0.0));
}

TEST_CASE("argmin is unchanged by canonicalization") {
  SeededRng rng(60);
  for (int trial = 0; trial < 5; ++trial) {
    const auto sample = gaussian_sample(rng, 4, 3, 3);
    const auto cf = canonicalize(sample);
    const auto canon = SampleSet<double>::from_concatenated(3, cf.canonical_data());
    const auto a = flipflop(sample, SymmetricMatrix<double>::identity(3));
    const auto b = flipflop(canon, SymmetricMatrix<double>::identity(3));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(max_abs_diff(a.k2, b.k2) <= 1e-6);
  }
}

TEST_CASE("canonical form file round trip") {
  const auto cf = canonical_from_c<Q>(2, 3, kExampleC);
  std::stringstream buf;
  write_canonical_form(buf, cf);
  std::string header;
  std::getline(buf, header);
  CHECK(header == "4 2 3 2");
  buf.seekg(0);
  const auto back = read_canonical_form<Q>(buf);
  CHECK(back.c == cf.c);
  CHECK(back.d == cf.d);
  CHECK(back.stacked_dab() == cf.stacked_dab());
}
