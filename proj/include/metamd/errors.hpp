#pragma once

#include <stdexcept>
#include <string>

namespace metamd {

/// Invalid input data (bad study summary, malformed file, bad config).
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical routine failed to meet its tolerance.
class NumericError : public std::runtime_error {
  public:
    NumericError(const std::string& msg, double achieved_tol)
        : std::runtime_error(msg), achieved_tol(achieved_tol) {}
    double achieved_tol;
};

}  // namespace metamd
