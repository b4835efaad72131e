#pragma once

#include <stdexcept>
#include <string>

namespace deconv {

/// Base class for every error raised by the library. The CLI maps each
/// subclass onto a distinct exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated: length mismatch, out-of-range parameter, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed mask string or CSV input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused because the mask length exceeds the cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Crossover quantities requested for two masks with no differing positions.
class UndefinedCrossover : public Error {
 public:
  using Error::Error;
};

/// Likelihood requested with no positions where the two masks differ.
class NoInformativePositions : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature failed to reach its requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}

  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace deconv
