#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "kronmle/matrix.hpp"

namespace kronmle {

// Shared matrix text format:
//
//   rows cols
//   a11 a12 ...
//   ...
//
// Rational entries are written as "p/q" (or "p"), doubles as shortest
// round-trip decimal literals. Either kind of entry parses into either
// scalar type; decimals parse exactly into Rational.
template <typename T>
Matrix<T> read_matrix(std::istream& in);

template <typename T>
void write_matrix(std::ostream& out, const Matrix<T>& m);

template <typename T>
std::string matrix_to_string(const Matrix<T>& m);

template <typename T>
Matrix<T> matrix_from_string(const std::string& text);

}  // namespace kronmle
