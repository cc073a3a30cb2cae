#pragma once

#include <stdexcept>
#include <string>

namespace qcorr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Raised when an operator fails a state/effect/basis invariant.
class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NotClassical : public Error {
 public:
  using Error::Error;
};

class DegeneracyUnresolved : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class SingularFrame : public Error {
 public:
  using Error::Error;
};

}  // namespace qcorr
