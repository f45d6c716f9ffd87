#pragma once

#include <stdexcept>
#include <string>

namespace levytree {

inline constexpr const char* kVersion = "0.3.0";

// Argument outside the documented domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Malformed composite input (e.g. inconsistent spinal decomposition).
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Root finder gave up; lo/hi is the last bracket it held.
struct SolverError : std::runtime_error {
  double lo, hi;
  SolverError(const std::string& what, double lo_, double hi_)
      : std::runtime_error(what), lo(lo_), hi(hi_) {}
};

// Quadrature did not reach the requested tolerance.
struct QuadratureError : std::runtime_error {
  double estimate, error_bound;
  QuadratureError(const std::string& what, double est, double err)
      : std::runtime_error(what), estimate(est), error_bound(err) {}
};

// Parameter regime the library refuses to evaluate.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_gamma(double gamma);

// Worker count for grid and replica loops: LEVYTREE_THREADS if set and positive,
// otherwise the hardware concurrency (at least 1).
int default_threads();

}  // namespace levytree
