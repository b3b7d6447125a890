#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace locpred {

// Iterative projection ran out of iterations before reaching tolerance.
// Carries the last iterate so callers can inspect how close it got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::MatrixXd last, double res)
      : std::runtime_error(what), last_iterate(std::move(last)), residual(res) {}

  Eigen::MatrixXd last_iterate;
  double residual = 0.0;
};

// A dense linear-algebra kernel failed (e.g. eigendecomposition did not
// converge); the message includes diagnostics about the offending matrix.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration would exceed the configured size cap.
class SizeCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input; `line` is 1-based within the offending file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line_no)
      : std::runtime_error(what), line(line_no) {}

  int line = 0;
};

}  // namespace locpred
