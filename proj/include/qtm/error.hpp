#pragma once

#include <stdexcept>
#include <string>

namespace qtm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class NegativeEigenvalue : public Error {
 public:
  using Error::Error;
};

/// A scalar argument (N, theta, M, ...) lies outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Operands expressed in different qubit bases were combined.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qtm
