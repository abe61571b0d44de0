#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kronmle/scalar.hpp"

namespace kronmle {

enum class TermOrder { Lex, Grevlex };

std::string to_string(TermOrder order);
TermOrder parse_term_order(std::string_view text);

inline constexpr std::size_t kMaxVars = 8;

struct Monomial {
  std::array<std::uint16_t, kMaxVars> exp{};
  std::uint32_t degree = 0;

  static Monomial variable(std::size_t index, std::uint16_t power = 1);

  bool is_one() const { return degree == 0; }
  bool divides(const Monomial& other) const;
  bool coprime(const Monomial& other) const;
  // True when the monomial is x_i^e with e >= 1 for some i; sets `var`.
  bool is_pure_power(std::size_t& var) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  // a / b, requires b | a.
  friend Monomial operator/(const Monomial& a, const Monomial& b);
  friend Monomial lcm(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exp == b.exp;
  }
};

// Positive when a > b in the given order, zero when equal.
int compare(const Monomial& a, const Monomial& b, TermOrder order);

class Ring {
 public:
  Ring(std::vector<std::string> variables, TermOrder order = TermOrder::Grevlex);

  std::size_t size() const { return variables_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::string& name(std::size_t i) const { return variables_.at(i); }
  TermOrder order() const { return order_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const Ring& a, const Ring& b) {
    return a.order_ == b.order_ && a.variables_ == b.variables_;
  }

 private:
  std::vector<std::string> variables_;
  TermOrder order_;
};

using RingPtr = std::shared_ptr<const Ring>;

RingPtr make_ring(std::vector<std::string> variables,
                  TermOrder order = TermOrder::Grevlex);

// Sparse polynomial over Q. Terms are kept sorted by decreasing monomial in
// the ring's order, with no zero coefficients.
class Polynomial {
 public:
  struct Term {
    Monomial monomial;
    Rational coeff;
  };

  explicit Polynomial(RingPtr ring);
  Polynomial(RingPtr ring, std::vector<Term> terms);

  static Polynomial constant(RingPtr ring, const Rational& c);
  static Polynomial variable(RingPtr ring, std::size_t index);
  static Polynomial variable(RingPtr ring, std::string_view name);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  // Throws std::domain_error on the zero polynomial.
  const Term& leading_term() const;
  const Monomial& leading_monomial() const { return leading_term().monomial; }
  const Rational& leading_coeff() const { return leading_term().coeff; }

  // -1 for the zero polynomial.
  long total_degree() const;
  unsigned degree_in(std::size_t var) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend bool operator==(const Polynomial& a, const Polynomial& b);

  Polynomial pow(unsigned e) const;
  Polynomial derivative(std::size_t var) const;
  Polynomial times_monomial(const Monomial& m, const Rational& c) const;

  Rational evaluate(const std::vector<Rational>& point) const;
  double evaluate(const std::vector<double>& point) const;
  Polynomial substitute(std::size_t var, const Rational& value) const;

  Polynomial monic() const;
  // Integer coefficients with gcd 1 and positive leading coefficient.
  Polynomial primitive() const;

  // Same polynomial in another ring, matching variables by name. Throws
  // std::invalid_argument when a used variable is missing from the target.
  Polynomial in_ring(const RingPtr& target) const;

 private:
  void normalize();
  void check_ring(const Polynomial& other) const;

  RingPtr ring_;
  std::vector<Term> terms_;
};

// Canonical text form, e.g. "3/2*k12^2*k22 - 5".
std::string to_string(const Polynomial& p);

// Accepts +, -, *, ^ with integer exponents, parentheses, integer and
// rational literals, and division by nonzero constants. Throws ParseError.
Polynomial parse_polynomial(const RingPtr& ring, std::string_view text);

// f / g when g divides f exactly, otherwise nullopt.
std::optional<Polynomial> divide_exact(const Polynomial& f, const Polynomial& g);

// Monic gcd of two polynomials in the single variable `var`.
Polynomial univariate_gcd(const Polynomial& f, const Polynomial& g, std::size_t var);

// Determinant by cofactor expansion along rows, memoizing minors by their
// column subset. Throws DimensionMismatch on a non-square or empty grid.
Polynomial poly_det(const std::vector<std::vector<Polynomial>>& grid);

}  // namespace kronmle
