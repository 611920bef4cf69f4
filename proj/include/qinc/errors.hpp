#pragma once

#include <stdexcept>
#include <string>

namespace qinc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or control value lies outside the regular domain of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

/// Raised by `inverse` when |det A| falls below the relative singularity threshold.
class SingularMatrix : public Error {
 public:
  SingularMatrix(const std::string& what, double det_abs)
      : Error(what + " (|det| = " + std::to_string(det_abs) + ")"), det_abs_(det_abs) {}
  double det_abs() const noexcept { return det_abs_; }

 private:
  double det_abs_;
};

/// The SLD-QFI matrix of a model point is singular, so R and the bounds are undefined.
class SingularModel : public Error {
 public:
  using Error::Error;
};

/// The state is numerically rank deficient and the derivative leaves the support;
/// the caller must use the pure-state route.
class PureLimit : public Error {
 public:
  using Error::Error;
};

/// RLD operators need a full-rank state.
class RldUndefined : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A computed report violates one of the bound inequalities.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace qinc
