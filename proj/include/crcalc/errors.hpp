#pragma once

#include <stdexcept>
#include <string>

namespace crcalc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A vector claimed to live in conjugate coordinates fails conj(b) = S b.
class InadmissibleVector : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

/// Analytic cogradients of a real field violate dzbar = conj(dz).
class ConjugationMismatch : public Error {
 public:
  using Error::Error;
};

class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

class RelationViolation : public Error {
 public:
  using Error::Error;
};

class SingularQ : public Error {
 public:
  using Error::Error;
};

class InadmissibleQ : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class Unidentifiable : public Error {
 public:
  using Error::Error;
};

}  // namespace crcalc
