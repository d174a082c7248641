#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace qineq {

// Argument outside the domain of an operation (p outside (0,1), nonpositive
// incomes where ratios are taken, malformed model strings, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The family has no closed-form entry for the requested function.
class unsupported_operation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class insufficient_data : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class rejected_transfer : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative numerics that failed to meet their tolerance.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, double residual)
      : std::runtime_error(what + " (residual estimate " + format(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  double residual_;
};

}  // namespace qineq
