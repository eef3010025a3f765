#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chaoslab {

// Bad arguments or violated preconditions detected before any work starts.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced a non-finite value, lost positivity, or otherwise
// broke an invariant while running.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Projected pairwise work exceeds the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double projected, double budget);

  double projected() const { return projected_; }
  double budget() const { return budget_; }

 private:
  double projected_;
  double budget_;
};

}  // namespace chaoslab
