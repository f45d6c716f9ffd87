#pragma once

#include <string>
#include <vector>

namespace levytree {

// One comparison of two independent routes to the same quantity.
struct Check {
  std::string name;
  double value = 0;      // primary route
  double reference = 0;  // second route or closed form
  double error = 0;      // as measured (relative unless the name says abs)
  double tol = 0;
  bool pass = false;
};

// Dual-route suite at one gamma. The Laplace cross-check of the tail series
// takes several seconds and is skipped when quick is set.
std::vector<Check> consistency_suite(double gamma, bool quick = false);

}  // namespace levytree
