#pragma once

#include <stdexcept>
#include <string>

namespace evopref {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters violate a documented precondition (game, penalties, configs).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The subjective game G(alpha_i, alpha_j) has no unique equilibrium:
/// 4 - kappa^2 (1 + alpha_i)(1 + alpha_j) vanishes.
class SingularEquilibrium : public Error {
 public:
  using Error::Error;
};

/// Gradient ascent found no admissible start.
class NoAscentProgress : public Error {
 public:
  using Error::Error;
};

/// Deviation search ran into the edge of its bracket while still improving.
class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace evopref
