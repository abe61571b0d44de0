#pragma once

#include <istream>
#include <ostream>
#include <vector>

#include "kronmle/matrix.hpp"
#include "kronmle/model.hpp"

namespace kronmle {

// Data reduced by the left GL(m1) action to Y = [I | C].
//
// D is the (n m2) x k matrix with D^T = [C^T | -I_k], so [I | C] D = 0. It is
// cut into n x k blocks d_ij of length m2 (block row i, column j), and
// D_ab = sum_i d_ia d_ib^T.
template <typename T>
struct CanonicalForm {
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  Matrix<T> c;
  Matrix<T> d;
  std::vector<Matrix<T>> dab;  // row-major k x k grid of m2 x m2 blocks
  // det(Y_*) of the eliminated leading block; 1 when built from C directly.
  T det_ystar = T(1);

  const Matrix<T>& block(std::size_t a, std::size_t b) const {
    return dab[a * k + b];
  }

  // d_ij as an m2 x 1 column.
  Matrix<T> d_vector(std::size_t i, std::size_t j) const {
    return d.block(i * m2, j, m2, 1);
  }

  // [I_m1 | C].
  Matrix<T> canonical_data() const;

  // The (m2 k) x (m2 k) matrix assembled from the D_ab grid.
  Matrix<T> stacked_dab() const;
};

// Throws NonPositiveK when n m2 <= m1 and DegenerateData when the leading
// m1 x m1 block is singular. No column pivoting is attempted.
template <typename T>
CanonicalForm<T> canonicalize(const SampleSet<T>& sample);

// Canonical form for data already of the shape [I | C].
template <typename T>
CanonicalForm<T> canonical_from_c(std::size_t m2, std::size_t n, Matrix<T> c);

template <typename T>
struct DetReduction {
  T lhs;             // det(Y (I_n kron K) Y^T), Y = [I | C]
  T rhs;             // det(K)^n det(D^T (I_n kron K^{-1}) D)
  T det_k_power;     // det(K)^n
  Matrix<T> inner;   // D^T (I_n kron K^{-1}) D, k x k
  T inner_det;
};

// Both sides of the determinant reduction identity, computed independently.
template <typename T>
DetReduction<T> det_reduction_check(const CanonicalForm<T>& cf,
                                    const SymmetricMatrix<T>& k);

// k x k matrix with entries tr(D_ab Sigma); equals D^T (I_n kron Sigma) D.
template <typename T>
Matrix<T> trace_form(const CanonicalForm<T>& cf, const SymmetricMatrix<T>& sigma);

template <typename T>
Matrix<T> trace_form(const CanonicalForm<T>& cf, const Matrix<T>& sigma);

// m2 log det(T(Sigma)) - k log det(Sigma) with T_ab = tr(D_ab Sigma), defined
// for any Sigma where both determinants are positive.
double reduced_objective(const CanonicalForm<double>& cf,
                         const Matrix<double>& sigma);

// Entrywise partial derivatives of reduced_objective:
// m2 sum_ab (T^{-1})_ba D_ab^T - k Sigma^{-T}.
Matrix<double> reduced_gradient(const CanonicalForm<double>& cf,
                                const Matrix<double>& sigma);

// The same gradient at symmetric Sigma written as an explicit sum over the
// symmetric group S_k:
// m2 det(T)^{-1} sum_pi sgn(pi) sum_b (prod_{a != b} T_{a pi(a)}) D_{b pi(b)}
//   - k Sigma^{-1}.
Matrix<double> reduced_gradient_permutation(const CanonicalForm<double>& cf,
                                            const SymmetricMatrix<double>& sigma);

// Header "m1 m2 n k", then C in the shared matrix format.
template <typename T>
void write_canonical_form(std::ostream& out, const CanonicalForm<T>& cf);

template <typename T>
CanonicalForm<T> read_canonical_form(std::istream& in);

}  // namespace kronmle
