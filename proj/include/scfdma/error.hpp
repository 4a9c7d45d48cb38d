#pragma once

#include <stdexcept>
#include <string>

namespace scfdma {

/// A user or sub-channel has no admissible option, so no exact cover exists.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, int user) : std::runtime_error(what), user_(user) {}
  int user() const noexcept { return user_; }

 private:
  int user_;
};

/// Exhaustive search was asked to explore more nodes than its ceiling allows.
class SearchLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine could not meet its contract (bracketing, NaN, zero rho).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scfdma
