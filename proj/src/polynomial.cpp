#include "kronmle/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <limits>
#include <map>
#include <stdexcept>

#include "kronmle/errors.hpp"

namespace kronmle {

std::string to_string(TermOrder order) {
  return order == TermOrder::Lex ? "lex" : "grevlex";
}

TermOrder parse_term_order(std::string_view text) {
  if (text == "lex") return TermOrder::Lex;
  if (text == "grevlex") return TermOrder::Grevlex;
  throw ParseError("unknown term order '" + std::string(text) + "'");
}

Monomial Monomial::variable(std::size_t index, std::uint16_t power) {
  if (index >= kMaxVars) throw std::out_of_range("monomial variable index");
  Monomial m;
  m.exp[index] = power;
  m.degree = power;
  return m;
}

bool Monomial::divides(const Monomial& other) const {
  if (degree > other.degree) return false;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (exp[i] > other.exp[i]) return false;
  return true;
}

bool Monomial::coprime(const Monomial& other) const {
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (exp[i] != 0 && other.exp[i] != 0) return false;
  return true;
}

bool Monomial::is_pure_power(std::size_t& var) const {
  if (degree == 0) return false;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (exp[i] != 0) {
      var = i;
      return exp[i] == degree;
    }
  }
  return false;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    const unsigned e = unsigned(a.exp[i]) + b.exp[i];
    if (e > std::numeric_limits<std::uint16_t>::max()) throw std::overflow_error("monomial exponent overflow");
    m.exp[i] = static_cast<std::uint16_t>(e);
  }
  m.degree = a.degree + b.degree;
  return m;
}

Monomial operator/(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) m.exp[i] = a.exp[i] - b.exp[i];
  m.degree = a.degree - b.degree;
  return m;
}

Monomial lcm(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    m.exp[i] = std::max(a.exp[i], b.exp[i]);
    m.degree += m.exp[i];
  }
  return m;
}

int compare(const Monomial& a, const Monomial& b, TermOrder order) {
  if (order == TermOrder::Lex) {
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (a.exp[i] != b.exp[i]) return a.exp[i] > b.exp[i] ? 1 : -1;
    return 0;
  }
  if (a.degree != b.degree) return a.degree > b.degree ? 1 : -1;
  for (std::size_t i = kMaxVars; i-- > 0;)
    if (a.exp[i] != b.exp[i]) return a.exp[i] < b.exp[i] ? 1 : -1;
  return 0;
}

Ring::Ring(std::vector<std::string> variables, TermOrder order)
    : variables_(std::move(variables)), order_(order) {
  if (variables_.size() > kMaxVars) {
    throw std::invalid_argument("at most " + std::to_string(kMaxVars) + " variables supported");
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.empty() || !(std::isalpha(static_cast<unsigned char>(v[0])) || v[0] == '_')) {
      throw std::invalid_argument("bad variable name '" + v + "'");
    }
    for (std::size_t j = 0; j < i; ++j)
      if (variables_[j] == v) throw std::invalid_argument("duplicate variable '" + v + "'");
  }
}

std::optional<std::size_t> Ring::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == name) return i;
  return std::nullopt;
}

RingPtr make_ring(std::vector<std::string> variables, TermOrder order) {
  return std::make_shared<const Ring>(std::move(variables), order);
}

Polynomial::Polynomial(RingPtr ring) : ring_(std::move(ring)) {
  if (!ring_) throw std::invalid_argument("polynomial needs a ring");
}

Polynomial::Polynomial(RingPtr ring, std::vector<Term> terms)
    : ring_(std::move(ring)), terms_(std::move(terms)) {
  if (!ring_) throw std::invalid_argument("polynomial needs a ring");
  normalize();
}

void Polynomial::normalize() {
  const TermOrder order = ring_->order();
  std::sort(terms_.begin(), terms_.end(), [order](const Term& a, const Term& b) {
    return compare(a.monomial, b.monomial, order) > 0;
  });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().monomial == t.monomial) {
      merged.back().coeff += t.coeff;
    } else {
      if (!merged.empty() && merged.back().coeff == 0) merged.pop_back();
      merged.push_back(std::move(t));
    }
  }
  if (!merged.empty() && merged.back().coeff == 0) merged.pop_back();
  terms_ = std::move(merged);
}

void Polynomial::check_ring(const Polynomial& other) const {
  if (ring_ != other.ring_ && !(*ring_ == *other.ring_)) {
    throw std::invalid_argument("polynomials live in different rings");
  }
}

Polynomial Polynomial::constant(RingPtr ring, const Rational& c) {
  Polynomial p(std::move(ring));
  if (c != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Polynomial Polynomial::variable(RingPtr ring, std::size_t index) {
  if (index >= ring->size()) throw std::out_of_range("variable index out of range");
  Polynomial p(std::move(ring));
  p.terms_.push_back({Monomial::variable(index), Rational(1)});
  return p;
}

Polynomial Polynomial::variable(RingPtr ring, std::string_view name) {
  const auto idx = ring->index_of(name);
  if (!idx) throw std::invalid_argument("unknown variable '" + std::string(name) + "'");
  return variable(std::move(ring), *idx);
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one());
}

const Polynomial::Term& Polynomial::leading_term() const {
  if (terms_.empty()) throw std::domain_error("zero polynomial has no leading term");
  return terms_.front();
}

long Polynomial::total_degree() const {
  long d = -1;
  for (const auto& t : terms_) d = std::max<long>(d, t.monomial.degree);
  return d;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.monomial.exp[var]);
  return d;
}

Polynomial Polynomial::operator-() const {
  Polynomial p = *this;
  for (auto& t : p.terms_) t.coeff = -t.coeff;
  return p;
}

namespace {

// Merge of two sorted term lists computing a + sign * b.
std::vector<Polynomial::Term> merge_terms(const std::vector<Polynomial::Term>& a,
                                          const std::vector<Polynomial::Term>& b,
                                          bool subtract, TermOrder order) {
  std::vector<Polynomial::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int cmp;
    if (i == a.size()) {
      cmp = -1;
    } else if (j == b.size()) {
      cmp = 1;
    } else {
      cmp = compare(a[i].monomial, b[j].monomial, order);
    }
    if (cmp > 0) {
      out.push_back(a[i++]);
    } else if (cmp < 0) {
      out.push_back({b[j].monomial, subtract ? Rational(-b[j].coeff) : b[j].coeff});
      ++j;
    } else {
      Rational c = subtract ? Rational(a[i].coeff - b[j].coeff) : Rational(a[i].coeff + b[j].coeff);
      if (c != 0) out.push_back({a[i].monomial, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_ring(other);
  terms_ = merge_terms(terms_, other.terms_, false, ring_->order());
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_ring(other);
  terms_ = merge_terms(terms_, other.terms_, true, ring_->order());
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  check_ring(other);
  std::vector<Term> products;
  products.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : other.terms_)
      products.push_back({a.monomial * b.monomial, a.coeff * b.coeff});
  terms_ = std::move(products);
  normalize();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& t : terms_) t.coeff *= c;
  }
  return *this;
}

bool operator==(const Polynomial& a, const Polynomial& b) {
  if (!(*a.ring_ == *b.ring_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i) {
    if (!(a.terms_[i].monomial == b.terms_[i].monomial) ||
        a.terms_[i].coeff != b.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(ring_, Rational(1));
  Polynomial base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (var >= ring_->size()) throw std::out_of_range("derivative variable out of range");
  std::vector<Term> out;
  for (const auto& t : terms_) {
    const auto e = t.monomial.exp[var];
    if (e == 0) continue;
    Term d = t;
    d.monomial.exp[var] = e - 1;
    d.monomial.degree -= 1;
    d.coeff *= e;
    out.push_back(std::move(d));
  }
  // Lowering one exponent preserves the relative order of distinct terms.
  Polynomial p(ring_);
  p.terms_ = std::move(out);
  return p;
}

Polynomial Polynomial::times_monomial(const Monomial& m, const Rational& c) const {
  Polynomial p(ring_);
  if (c == 0) return p;
  p.terms_.reserve(terms_.size());
  for (const auto& t : terms_) p.terms_.push_back({t.monomial * m, t.coeff * c});
  return p;
}

Rational Polynomial::evaluate(const std::vector<Rational>& point) const {
  if (point.size() != ring_->size()) throw DimensionMismatch("evaluation point has wrong length");
  Rational sum = 0;
  for (const auto& t : terms_) {
    Rational v = t.coeff;
    for (std::size_t i = 0; i < point.size(); ++i)
      for (unsigned e = 0; e < t.monomial.exp[i]; ++e) v *= point[i];
    sum += v;
  }
  return sum;
}

double Polynomial::evaluate(const std::vector<double>& point) const {
  if (point.size() != ring_->size()) throw DimensionMismatch("evaluation point has wrong length");
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff.get_d();
    for (std::size_t i = 0; i < point.size(); ++i)
      for (unsigned e = 0; e < t.monomial.exp[i]; ++e) v *= point[i];
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::substitute(std::size_t var, const Rational& value) const {
  if (var >= ring_->size()) throw std::out_of_range("substitute variable out of range");
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Term s = t;
    for (unsigned e = 0; e < t.monomial.exp[var]; ++e) s.coeff *= value;
    s.monomial.degree -= s.monomial.exp[var];
    s.monomial.exp[var] = 0;
    out.push_back(std::move(s));
  }
  return Polynomial(ring_, std::move(out));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  Polynomial p = *this;
  p *= Rational(1) / leading_coeff();
  return p;
}

Polynomial Polynomial::primitive() const {
  if (is_zero()) return *this;
  Integer den_lcm = 1;
  for (const auto& t : terms_) {
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), t.coeff.get_den_mpz_t());
  }
  Integer num_gcd = 0;
  for (const auto& t : terms_) {
    const Integer scaled = t.coeff.get_num() * (den_lcm / t.coeff.get_den());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), scaled.get_mpz_t());
  }
  Rational factor(den_lcm, num_gcd);
  factor.canonicalize();
  if (leading_coeff() < 0) factor = -factor;
  Polynomial p = *this;
  p *= factor;
  return p;
}

Polynomial Polynomial::in_ring(const RingPtr& target) const {
  std::vector<std::size_t> map(ring_->size());
  for (std::size_t i = 0; i < ring_->size(); ++i) {
    const auto idx = target->index_of(ring_->name(i));
    map[i] = idx ? *idx : kMaxVars;
  }
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Term s{Monomial{}, t.coeff};
    for (std::size_t i = 0; i < ring_->size(); ++i) {
      if (t.monomial.exp[i] == 0) continue;
      if (map[i] == kMaxVars) {
        throw std::invalid_argument("variable '" + ring_->name(i) + "' missing from target ring");
      }
      s.monomial.exp[map[i]] = t.monomial.exp[i];
    }
    s.monomial.degree = t.monomial.degree;
    out.push_back(std::move(s));
  }
  return Polynomial(target, std::move(out));
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    Rational mag = abs(t.coeff);
    if (first) {
      if (t.coeff < 0) out += "-";
    } else {
      out += t.coeff < 0 ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < p.ring()->size(); ++i) {
      const auto e = t.monomial.exp[i];
      if (e == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += p.ring()->name(i);
      if (e > 1) mono += "^" + std::to_string(e);
    }
    if (mono.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += to_string(mag) + "*" + mono;
    }
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(const RingPtr& ring, std::string_view text) : ring_(ring), text_(text) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc *= unary();
      } else if (accept('/')) {
        const Polynomial d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by a non-constant or zero");
        acc *= Rational(1) / d.leading_coeff();
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    Polynomial base = primary();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(std::string(text_.substr(start, pos_ - start)))));
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Polynomial::constant(ring_, Rational(std::string(text_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const auto name = text_.substr(start, pos_ - start);
      const auto idx = ring_->index_of(name);
      if (!idx) fail("unknown variable '" + std::string(name) + "'");
      return Polynomial::variable(ring_, *idx);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const RingPtr& ring_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const RingPtr& ring, std::string_view text) {
  return PolyParser(ring, text).parse();
}

std::optional<Polynomial> divide_exact(const Polynomial& f, const Polynomial& g) {
  if (g.is_zero()) throw std::domain_error("division by the zero polynomial");
  Polynomial rem = f;
  Polynomial quot(f.ring());
  const auto& lt = g.leading_term();
  while (!rem.is_zero()) {
    const auto& head = rem.leading_term();
    if (!lt.monomial.divides(head.monomial)) return std::nullopt;
    const Monomial m = head.monomial / lt.monomial;
    const Rational c = head.coeff / lt.coeff;
    rem -= g.times_monomial(m, c);
    quot += Polynomial(f.ring(), {{m, c}});
  }
  return quot;
}

namespace {

void require_univariate(const Polynomial& p, std::size_t var) {
  for (const auto& t : p.terms()) {
    if (t.monomial.degree != t.monomial.exp[var]) {
      throw std::invalid_argument("univariate_gcd: polynomial involves other variables");
    }
  }
}

Polynomial univariate_remainder(Polynomial f, const Polynomial& g) {
  const auto& lt = g.leading_term();
  while (!f.is_zero() && lt.monomial.divides(f.leading_monomial())) {
    const Monomial m = f.leading_monomial() / lt.monomial;
    f -= g.times_monomial(m, f.leading_coeff() / lt.coeff);
  }
  return f;
}

}  // namespace

Polynomial univariate_gcd(const Polynomial& f, const Polynomial& g, std::size_t var) {
  require_univariate(f, var);
  require_univariate(g, var);
  Polynomial a = f;
  Polynomial b = g;
  while (!b.is_zero()) {
    Polynomial r = univariate_remainder(a, b);
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

Polynomial poly_det(const std::vector<std::vector<Polynomial>>& grid) {
  const std::size_t n = grid.size();
  if (n == 0) throw DimensionMismatch("poly_det: empty grid");
  if (n > 20) throw DimensionMismatch("poly_det: grid too large for subset memoization");
  for (const auto& row : grid)
    if (row.size() != n) throw DimensionMismatch("poly_det: grid is not square");
  const RingPtr ring = grid[0][0].ring();

  // minors[mask]: determinant of the bottom popcount(mask) rows restricted to
  // the columns in mask.
  std::vector<std::optional<Polynomial>> minors(std::size_t{1} << n);
  minors[0] = Polynomial::constant(ring, Rational(1));
  for (std::size_t mask = 1; mask < minors.size(); ++mask) {
    const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
    const std::size_t row = n - size;
    Polynomial sum(ring);
    std::size_t position = 0;
    for (std::size_t col = 0; col < n; ++col) {
      if (!(mask & (std::size_t{1} << col))) continue;
      const Polynomial& entry = grid[row][col];
      const Polynomial& minor = *minors[mask & ~(std::size_t{1} << col)];
      if (!entry.is_zero() && !minor.is_zero()) {
        if (position % 2 == 0) {
          sum += entry * minor;
        } else {
          sum -= entry * minor;
        }
      }
      ++position;
    }
    minors[mask] = std::move(sum);
  }
  return *minors.back();
}

}  // namespace kronmle
