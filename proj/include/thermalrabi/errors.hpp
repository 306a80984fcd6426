#pragma once

#include <stdexcept>

namespace thermalrabi {

// Invalid physical or algorithmic argument (wrong sign, out of range).
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Quadrature or solver failure: non-convergence, non-finite intermediate.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nonlinear fit failure: boundary solution or under-constrained data.
class fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested computation exceeds a configured budget.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or input file.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace thermalrabi
