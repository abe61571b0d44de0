#include "kronmle/matrix_io.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

namespace kronmle {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw ParseError("empty numeric token");
  if (text.find('/') != std::string::npos) {
    Rational r;
    if (r.set_str(text, 10) != 0 || r.get_den() == 0) {
      throw ParseError("malformed rational '" + text + "'");
    }
    r.canonicalize();
    return r;
  }
  // Decimal literal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    digits += text[pos++];
    seen_digit = true;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      digits += text[pos++];
      --exponent;
      seen_digit = true;
    }
  }
  if (!seen_digit) throw ParseError("malformed number '" + text + "'");
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    long e = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, e);
    if (ec != std::errc() || ptr != end) {
      throw ParseError("malformed exponent in '" + text + "'");
    }
    exponent += e;
    pos = text.size();
  }
  if (pos != text.size()) throw ParseError("trailing characters in '" + text + "'");
  Integer mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  Integer power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent >= 0 ? Rational(mantissa * power) : Rational(mantissa, power);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& x) { return x.get_str(); }

std::string to_string(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

namespace {

template <typename T>
T parse_entry(const std::string& token);

template <>
Rational parse_entry<Rational>(const std::string& token) {
  return parse_rational(token);
}

template <>
double parse_entry<double>(const std::string& token) {
  if (token.find('/') != std::string::npos) return parse_rational(token).get_d();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("malformed number '" + token + "'");
  }
  return v;
}

}  // namespace

template <typename T>
Matrix<T> read_matrix(std::istream& in) {
  long rows = 0;
  long cols = 0;
  if (!(in >> rows >> cols)) throw ParseError("missing matrix header 'rows cols'");
  if (rows <= 0 || cols <= 0) throw ParseError("matrix dimensions must be positive");
  std::vector<T> entries;
  entries.reserve(static_cast<std::size_t>(rows * cols));
  std::string token;
  for (long i = 0; i < rows * cols; ++i) {
    if (!(in >> token)) {
      throw ParseError("expected " + std::to_string(rows * cols) +
                       " entries, got " + std::to_string(i));
    }
    entries.push_back(parse_entry<T>(token));
  }
  return Matrix<T>(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols),
                   std::move(entries));
}

template <typename T>
void write_matrix(std::ostream& out, const Matrix<T>& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << to_string(m(i, j));
    }
    out << '\n';
  }
}

template <typename T>
std::string matrix_to_string(const Matrix<T>& m) {
  std::ostringstream out;
  write_matrix(out, m);
  return out.str();
}

template <typename T>
Matrix<T> matrix_from_string(const std::string& text) {
  std::istringstream in(text);
  return read_matrix<T>(in);
}

template Matrix<double> read_matrix(std::istream&);
template Matrix<Rational> read_matrix(std::istream&);
template void write_matrix(std::ostream&, const Matrix<double>&);
template void write_matrix(std::ostream&, const Matrix<Rational>&);
template std::string matrix_to_string(const Matrix<double>&);
template std::string matrix_to_string(const Matrix<Rational>&);
template Matrix<double> matrix_from_string(const std::string&);
template Matrix<Rational> matrix_from_string(const std::string&);

}  // namespace kronmle
