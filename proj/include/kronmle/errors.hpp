#pragma once

#include <stdexcept>
#include <string>

namespace kronmle {

// Base class for every failure raised by the library.
class KronError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public KronError {
 public:
  using KronError::KronError;
};

class SingularMatrix : public KronError {
 public:
  using KronError::KronError;
};

class NotPositiveDefinite : public KronError {
 public:
  using KronError::KronError;
};

// The leading m1 x m1 block of the concatenated data is singular.
class DegenerateData : public KronError {
 public:
  using KronError::KronError;
};

// n * m2 - m1 <= 0.
class NonPositiveK : public KronError {
 public:
  using KronError::KronError;
};

// An engine was called outside the (m1, m2, n) regime it handles.
class WrongRegime : public KronError {
 public:
  using KronError::KronError;
};

class MleNotExists : public KronError {
 public:
  using KronError::KronError;
};

class ParseError : public KronError {
 public:
  using KronError::KronError;
};

}  // namespace kronmle
