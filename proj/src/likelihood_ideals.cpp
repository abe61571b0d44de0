#include "kronmle/likelihood_ideals.hpp"

#include <chrono>
#include <cmath>

#include "kronmle/errors.hpp"
#include "kronmle/random.hpp"

namespace kronmle {

SampleSet<Rational> ml_degree_sample(std::size_t m1, std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<Matrix<Rational>> data;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix<Rational> y(m1, 2);
    for (std::size_t r = 0; r < m1; ++r)
      for (std::size_t c = 0; c < 2; ++c) y(r, c) = Rational(rng.uniform_int(0, 16));
    data.push_back(std::move(y));
  }
  return SampleSet<Rational>(m1, 2, std::move(data));
}

LikelihoodSystem likelihood_system_m2_2(const SampleSet<Rational>& sample) {
  if (sample.m2() != 2) throw WrongRegime("likelihood equations are built for m2 = 2 only");
  const RingPtr ring = make_ring({"k12", "k22"}, TermOrder::Grevlex);
  const Polynomial one = Polynomial::constant(ring, Rational(1));
  const Polynomial k12 = Polynomial::variable(ring, 0);
  const Polynomial k22 = Polynomial::variable(ring, 1);
  const std::size_t m1 = sample.m1();

  // (Y K Y^T)_ab = y_a0 y_b0 + (y_a0 y_b1 + y_a1 y_b0) k12 + y_a1 y_b1 k22.
  std::vector<std::vector<Polynomial>> grid(m1, std::vector<Polynomial>(m1, Polynomial(ring)));
  for (std::size_t a = 0; a < m1; ++a) {
    for (std::size_t b = 0; b < m1; ++b) {
      Rational s0 = 0, s1 = 0, s2 = 0;
      for (const auto& y : sample.data()) {
        s0 += y(a, 0) * y(b, 0);
        s1 += y(a, 0) * y(b, 1) + y(a, 1) * y(b, 0);
        s2 += y(a, 1) * y(b, 1);
      }
      grid[a][b] = s0 * one + s1 * k12 + s2 * k22;
    }
  }
  Polynomial g1 = poly_det(grid);
  Polynomial g2 = k22 - k12 * k12;

  const Rational m2q(2);
  const Rational m1q(static_cast<long>(m1));
  std::vector<Polynomial> equations;
  for (std::size_t e : {std::size_t{1}, std::size_t{0}}) {
    equations.push_back(m2q * g2 * g1.derivative(e) - m1q * g1 * g2.derivative(e));
  }
  PolyIdeal base(ring, equations);
  const Polynomial f = g1 * g2 * k22;
  // g1 vanishes identically when 2n < m1; saturating by 0 gives the unit ideal.
  PolyIdeal saturated =
      f.is_zero() ? PolyIdeal(make_ring({"y", "k12", "k22"}, TermOrder::Grevlex), {})
                  : saturate_rabinowitsch(base, f, "y");
  if (f.is_zero()) {
    saturated.generators.push_back(Polynomial::constant(saturated.ring, Rational(1)));
  }
  return LikelihoodSystem{ring, std::move(g1), std::move(g2), std::move(equations),
                          std::move(saturated)};
}

PolyIdeal likelihood_equations_m2_2(std::size_t m1, std::size_t n, std::uint64_t seed) {
  return likelihood_system_m2_2(ml_degree_sample(m1, n, seed)).saturated;
}

MlDegreeResult ml_degree(std::size_t m1, std::size_t n, std::uint64_t seed,
                         std::size_t pair_budget) {
  const auto start = std::chrono::steady_clock::now();
  MlDegreeResult r;
  r.m1 = m1;
  r.n = n;
  r.seed = seed;
  const PolyIdeal ideal = likelihood_equations_m2_2(m1, n, seed);
  const GroebnerOutcome outcome = buchberger(ideal, TermOrder::Grevlex, pair_budget);
  if (const auto* gb = std::get_if<GroebnerBasis>(&outcome)) {
    const DimDegree dd = dim_and_degree(*gb);
    r.zero_dimensional = dd.zero_dimensional;
    r.degree = dd.zero_dimensional ? *dd.degree : 0;
    r.basis_size = gb->basis.size();
  } else {
    r.timed_out = true;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_string(MultiplicityCase c) { return c == MultiplicityCase::One ? "one" : "two"; }

MultiplicityCase parse_multiplicity_case(const std::string& text) {
  if (text == "one" || text == "1") return MultiplicityCase::One;
  if (text == "two" || text == "2") return MultiplicityCase::Two;
  throw ParseError("case must be 'one' or 'two', got '" + text + "'");
}

namespace {

// Rational function with a denominator kept as a product of primitive factors.
struct Fraction {
  Polynomial num;
  std::vector<std::pair<Polynomial, unsigned>> den;

  Polynomial denominator() const {
    Polynomial d = Polynomial::constant(num.ring(), Rational(1));
    for (const auto& [f, e] : den) d *= f.pow(e);
    return d;
  }
};

void cancel(Fraction& f) {
  if (f.num.is_zero()) {
    f.den.clear();
    return;
  }
  for (auto& [factor, mult] : f.den) {
    while (mult > 0) {
      auto q = divide_exact(f.num, factor);
      if (!q) break;
      f.num = std::move(*q);
      --mult;
    }
  }
  std::erase_if(f.den, [](const auto& fe) { return fe.second == 0; });
}

Fraction make_fraction(Polynomial num, const std::vector<Polynomial>& factors) {
  Fraction f{std::move(num), {}};
  for (const auto& factor : factors) {
    if (factor.is_zero()) throw std::domain_error("zero denominator factor");
    const Polynomial prim = factor.primitive();
    f.num *= prim.leading_coeff() / factor.leading_coeff();
    if (prim.is_constant()) continue;
    bool merged = false;
    for (auto& [g, e] : f.den) {
      if (g == prim) {
        ++e;
        merged = true;
      }
    }
    if (!merged) f.den.emplace_back(prim, 1u);
  }
  cancel(f);
  return f;
}

Polynomial cofactor(const Fraction& f, const std::vector<std::pair<Polynomial, unsigned>>& den) {
  Polynomial c = Polynomial::constant(f.num.ring(), Rational(1));
  for (const auto& [g, e] : den) {
    unsigned have = 0;
    for (const auto& [h, eh] : f.den)
      if (h == g) have = eh;
    c *= g.pow(e - have);
  }
  return c;
}

Fraction add(const Fraction& a, const Fraction& b, bool subtract = false) {
  std::vector<std::pair<Polynomial, unsigned>> den = a.den;
  for (const auto& [g, e] : b.den) {
    bool found = false;
    for (auto& [h, eh] : den) {
      if (h == g) {
        eh = std::max(eh, e);
        found = true;
      }
    }
    if (!found) den.emplace_back(g, e);
  }
  Polynomial num = a.num * cofactor(a, den);
  if (subtract) {
    num -= b.num * cofactor(b, den);
  } else {
    num += b.num * cofactor(b, den);
  }
  Fraction out{std::move(num), std::move(den)};
  cancel(out);
  return out;
}

Fraction scale(Fraction f, const Rational& c) {
  f.num *= c;
  cancel(f);
  return f;
}

struct CaseEquations {
  RingPtr ring;
  Fraction first;   // e1 or e4 (divisible by b)
  Fraction second;  // e2 or e3
  std::size_t main_var;  // t or c
  std::size_t b_var;
};

CaseEquations build_equations(long m2, long k, MultiplicityCase which) {
  if (k < 2) throw WrongRegime("multiplicity systems need k >= 2, got k = " + std::to_string(k));
  if (which == MultiplicityCase::One && m2 <= 2) {
    throw WrongRegime("case one needs m2 > 2, got m2 = " + std::to_string(m2));
  }
  if (which == MultiplicityCase::Two && m2 != 2) {
    throw WrongRegime("case two needs m2 = 2, got m2 = " + std::to_string(m2));
  }
  const Rational M2(m2), K(k);
  if (which == MultiplicityCase::One) {
    const RingPtr ring = make_ring({"y", "t", "b"}, TermOrder::Grevlex);
    const auto t = Polynomial::variable(ring, "t");
    const auto b = Polynomial::variable(ring, "b");
    const auto c = [&](const Rational& v) { return Polynomial::constant(ring, v); };
    const Polynomial p = c(4) * t * (t + c(1)) - b * b;
    const Fraction e1 = add(make_fraction(c(-2 * M2) * b, {p}),
                            make_fraction(c(2 * K) * b, {c(1) - b, c(1) + b}));
    const Fraction inner = add(make_fraction(c(8) * t + c(4), {p}), make_fraction(c(K - 2), {t}));
    const Fraction e2 = add(scale(inner, M2), make_fraction(c(K * (M2 - 2)), {t - c(2)}), true);
    return {ring, e1, e2, 1, 2};
  }
  const RingPtr ring = make_ring({"y", "b", "c"}, TermOrder::Grevlex);
  const auto b = Polynomial::variable(ring, "b");
  const auto cv = Polynomial::variable(ring, "c");
  const auto c = [&](const Rational& v) { return Polynomial::constant(ring, v); };
  const Polynomial q = c(2) * (cv + c(1)) * (c(2) * cv + c(3)) - b * b;
  const Fraction inner = add(make_fraction(c(8) * cv + c(10), {q}), make_fraction(c(K - 2), {cv + c(1)}));
  const Fraction e3 = add(scale(inner, M2), make_fraction(c(K), {cv - b * b}), true);
  const Fraction e4 = add(make_fraction(c(-2 * M2) * b, {q}), make_fraction(c(2 * K) * b, {cv - b * b}));
  return {ring, e4, e3, 2, 1};
}

}  // namespace

PolyIdeal prop43_system(long m2, long k, MultiplicityCase which) {
  const CaseEquations eq = build_equations(m2, k, which);
  const RingPtr& ring = eq.ring;
  const Polynomial y = Polynomial::variable(ring, "y");
  std::vector<Polynomial> gens;
  if (which == MultiplicityCase::One) {
    gens = {eq.first.num, eq.second.num};
  } else {
    gens = {eq.second.num, eq.first.num};
  }
  gens.push_back(y * eq.first.denominator() * eq.second.denominator() -
                 Polynomial::constant(ring, Rational(1)));
  return PolyIdeal(ring, std::move(gens));
}

QuadraticInfo b0_quadratic(long m2, long k, MultiplicityCase which) {
  const CaseEquations eq = build_equations(m2, k, which);
  const std::size_t v = eq.main_var;
  const Polynomial num = eq.second.num.substitute(eq.b_var, Rational(0));
  const Polynomial den = eq.second.denominator().substitute(eq.b_var, Rational(0));
  if (num.is_zero()) throw DegenerateData("b = 0 branch vanishes identically");
  const Polynomial g = univariate_gcd(num, den, v);
  Polynomial n0 = *divide_exact(num, g);
  Polynomial d0 = *divide_exact(den, g);
  const Polynomial dp = d0.primitive();
  n0 *= dp.leading_coeff() / d0.leading_coeff();

  QuadraticInfo info{n0, dp, Rational(0), {}};
  const unsigned deg = n0.degree_in(v);
  Rational coef[3] = {0, 0, 0};
  for (const auto& t : n0.terms())
    if (t.monomial.exp[v] <= 2) coef[t.monomial.exp[v]] = t.coeff;
  if (deg == 2) {
    info.discriminant = coef[1] * coef[1] - 4 * coef[2] * coef[0];
    if (info.discriminant >= 0) {
      const double sq = std::sqrt(info.discriminant.get_d());
      const double a = coef[2].get_d(), bb = coef[1].get_d();
      info.real_roots = {(-bb - sq) / (2 * a), (-bb + sq) / (2 * a)};
    }
  } else if (deg == 1) {
    info.real_roots = {Rational(-coef[0] / coef[1]).get_d()};
  }
  return info;
}

MultiplicityResult ml_multiplicity_prop43(long m2, long k, MultiplicityCase which,
                                          std::size_t pair_budget) {
  MultiplicityResult r;
  r.bound = which == MultiplicityCase::One ? 5 : 4;
  const PolyIdeal ideal = prop43_system(m2, k, which);
  const GroebnerOutcome outcome = buchberger(ideal, TermOrder::Grevlex, pair_budget);
  if (const auto* gb = std::get_if<GroebnerBasis>(&outcome)) {
    const DimDegree dd = dim_and_degree(*gb);
    if (dd.unit_ideal) {
      r.count = 0;
    } else if (dd.zero_dimensional) {
      r.count = *dd.degree;
    }
  } else {
    r.timed_out = true;
  }
  if (r.count) {
    r.at_least_two = *r.count >= 2;
    r.within_bound = *r.count <= r.bound;
  }
  return r;
}

}  // namespace kronmle
