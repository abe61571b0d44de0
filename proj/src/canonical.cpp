#include "kronmle/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "kronmle/matrix_io.hpp"

namespace kronmle {

template <typename T>
Matrix<T> CanonicalForm<T>::canonical_data() const {
  Matrix<T> y(m1, m1 + k);
  for (std::size_t i = 0; i < m1; ++i) {
    y(i, i) = T(1);
    for (std::size_t j = 0; j < k; ++j) y(i, m1 + j) = c(i, j);
  }
  return y;
}

template <typename T>
Matrix<T> CanonicalForm<T>::stacked_dab() const {
  Matrix<T> out(m2 * k, m2 * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t p = 0; p < m2; ++p)
        for (std::size_t q = 0; q < m2; ++q)
          out(a * m2 + p, b * m2 + q) = block(a, b)(p, q);
  return out;
}

template struct CanonicalForm<double>;
template struct CanonicalForm<Rational>;

template <typename T>
CanonicalForm<T> canonical_from_c(std::size_t m2, std::size_t n, Matrix<T> c) {
  const std::size_t m1 = c.rows();
  const std::size_t k = c.cols();
  if (m2 == 0 || k == 0 || m1 + k != n * m2) {
    throw DimensionMismatch("canonical_from_c: need C of size m1 x (n*m2 - m1), k >= 1");
  }
  CanonicalForm<T> cf;
  cf.m1 = m1;
  cf.m2 = m2;
  cf.n = n;
  cf.k = k;
  cf.d = vstack(c, -Matrix<T>::identity(k));
  cf.c = std::move(c);
  cf.dab.reserve(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      Matrix<T> sum(m2, m2);
      for (std::size_t i = 0; i < n; ++i) {
        sum = sum + cf.d_vector(i, a) * cf.d_vector(i, b).transpose();
      }
      cf.dab.push_back(std::move(sum));
    }
  }
  return cf;
}

template <typename T>
CanonicalForm<T> canonicalize(const SampleSet<T>& sample) {
  const long k = sample.k();
  if (k <= 0) {
    throw NonPositiveK("canonicalize: k = n*m2 - m1 = " + std::to_string(k) +
                       " must be positive");
  }
  const Matrix<T> y = sample.concatenated();
  const std::size_t m1 = sample.m1();
  const Matrix<T> ystar = y.block(0, 0, m1, m1);
  const Matrix<T> rest = y.block(0, m1, m1, static_cast<std::size_t>(k));
  Matrix<T> c;
  try {
    c = solve(ystar, rest);
  } catch (const SingularMatrix&) {
    throw DegenerateData("canonicalize: leading m1 x m1 block Y_* is singular");
  }
  CanonicalForm<T> cf = canonical_from_c(sample.m2(), sample.n(), std::move(c));
  cf.det_ystar = det(ystar);
  return cf;
}

template CanonicalForm<double> canonical_from_c(std::size_t, std::size_t, Matrix<double>);
template CanonicalForm<Rational> canonical_from_c(std::size_t, std::size_t, Matrix<Rational>);
template CanonicalForm<double> canonicalize(const SampleSet<double>&);
template CanonicalForm<Rational> canonicalize(const SampleSet<Rational>&);

namespace {

template <typename T>
T power(const T& base, std::size_t e) {
  T out(1);
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

template <typename T>
DetReduction<T> det_reduction_check(const CanonicalForm<T>& cf,
                                    const SymmetricMatrix<T>& k) {
  if (k.dim() != cf.m2) throw DimensionMismatch("det_reduction_check: K must be m2 x m2");
  const Matrix<T> kf = k.full();
  const Matrix<T> k_inv = inverse(kf);
  const Matrix<T> eye_n = Matrix<T>::identity(cf.n);
  const Matrix<T> y = cf.canonical_data();

  DetReduction<T> r;
  r.lhs = det(y * kron(eye_n, kf) * y.transpose());
  r.inner = cf.d.transpose() * kron(eye_n, k_inv) * cf.d;
  r.inner_det = det(r.inner);
  r.det_k_power = power(det(kf), cf.n);
  r.rhs = r.det_k_power * r.inner_det;
  return r;
}

template DetReduction<double> det_reduction_check(const CanonicalForm<double>&, const SymmetricMatrix<double>&);
template DetReduction<Rational> det_reduction_check(const CanonicalForm<Rational>&, const SymmetricMatrix<Rational>&);

template <typename T>
Matrix<T> trace_form(const CanonicalForm<T>& cf, const Matrix<T>& sigma) {
  if (sigma.rows() != cf.m2 || sigma.cols() != cf.m2) {
    throw DimensionMismatch("trace_form: Sigma must be m2 x m2");
  }
  Matrix<T> out(cf.k, cf.k);
  for (std::size_t a = 0; a < cf.k; ++a) {
    for (std::size_t b = 0; b < cf.k; ++b) {
      const Matrix<T>& dab = cf.block(a, b);
      T tr(0);
      for (std::size_t p = 0; p < cf.m2; ++p)
        for (std::size_t q = 0; q < cf.m2; ++q) tr += dab(p, q) * sigma(q, p);
      out(a, b) = tr;
    }
  }
  return out;
}

template <typename T>
Matrix<T> trace_form(const CanonicalForm<T>& cf, const SymmetricMatrix<T>& sigma) {
  return trace_form(cf, sigma.full());
}

template Matrix<double> trace_form(const CanonicalForm<double>&, const Matrix<double>&);
template Matrix<Rational> trace_form(const CanonicalForm<Rational>&, const Matrix<Rational>&);
template Matrix<double> trace_form(const CanonicalForm<double>&, const SymmetricMatrix<double>&);
template Matrix<Rational> trace_form(const CanonicalForm<Rational>&, const SymmetricMatrix<Rational>&);

double reduced_objective(const CanonicalForm<double>& cf, const Matrix<double>& sigma) {
  const Matrix<double> t = trace_form(cf, sigma);
  return static_cast<double>(cf.m2) * log_abs_det(t) -
         static_cast<double>(cf.k) * log_abs_det(sigma);
}

Matrix<double> reduced_gradient(const CanonicalForm<double>& cf,
                                const Matrix<double>& sigma) {
  const Matrix<double> t_inv = inverse(trace_form(cf, sigma));
  Matrix<double> g(cf.m2, cf.m2);
  for (std::size_t a = 0; a < cf.k; ++a)
    for (std::size_t b = 0; b < cf.k; ++b)
      g = g + t_inv(b, a) * cf.block(a, b).transpose();
  return static_cast<double>(cf.m2) * g -
         static_cast<double>(cf.k) * inverse(sigma).transpose();
}

Matrix<double> reduced_gradient_permutation(const CanonicalForm<double>& cf,
                                            const SymmetricMatrix<double>& sigma) {
  const Matrix<double> t = trace_form(cf, sigma);
  const std::size_t k = cf.k;
  std::vector<std::size_t> pi(k);
  std::iota(pi.begin(), pi.end(), 0);
  Matrix<double> sum(cf.m2, cf.m2);
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        if (pi[i] > pi[j]) ++inversions;
    const double sign = inversions % 2 ? -1.0 : 1.0;
    for (std::size_t b = 0; b < k; ++b) {
      double prod = sign;
      for (std::size_t a = 0; a < k; ++a)
        if (a != b) prod *= t(a, pi[a]);
      sum = sum + prod * cf.block(b, pi[b]);
    }
  } while (std::next_permutation(pi.begin(), pi.end()));
  const double scale = static_cast<double>(cf.m2) / det(t);
  return scale * sum - static_cast<double>(k) * inverse(sigma).full();
}

template <typename T>
void write_canonical_form(std::ostream& out, const CanonicalForm<T>& cf) {
  out << cf.m1 << ' ' << cf.m2 << ' ' << cf.n << ' ' << cf.k << '\n';
  write_matrix(out, cf.c);
}

template <typename T>
CanonicalForm<T> read_canonical_form(std::istream& in) {
  long m1 = 0, m2 = 0, n = 0, k = 0;
  if (!(in >> m1 >> m2 >> n >> k)) throw ParseError("missing canonical header 'm1 m2 n k'");
  if (m1 <= 0 || m2 <= 0 || n <= 0 || k <= 0 || n * m2 - m1 != k) {
    throw ParseError("canonical header must satisfy k = n*m2 - m1 >= 1");
  }
  Matrix<T> c = read_matrix<T>(in);
  if (c.rows() != static_cast<std::size_t>(m1) || c.cols() != static_cast<std::size_t>(k)) {
    throw ParseError("C must be m1 x k");
  }
  return canonical_from_c(static_cast<std::size_t>(m2), static_cast<std::size_t>(n), std::move(c));
}

template void write_canonical_form(std::ostream&, const CanonicalForm<double>&);
template void write_canonical_form(std::ostream&, const CanonicalForm<Rational>&);
template CanonicalForm<double> read_canonical_form(std::istream&);
template CanonicalForm<Rational> read_canonical_form(std::istream&);

}  // namespace kronmle
