#include <doctest.h>

#include <cmath>

#include "levytree/consistency.hpp"

using namespace levytree;

TEST_CASE("dual routes agree across gamma") {
  for (double g : {1.05, 1.1, 1.3, 1.5, 1.8, 2.0}) {
    CAPTURE(g);
    const auto checks = consistency_suite(g, true);
    CHECK(checks.size() >= 12);
    for (const auto& c : checks) {
      CAPTURE(c.name);
      CAPTURE(c.error);
      CHECK(c.pass);
    }
  }
}

TEST_CASE("unavailable routes are reported, not thrown") {
  // beta_n overflow double this close to 1
  const auto checks = consistency_suite(1.02, true);
  int refused = 0;
  for (const auto& c : checks)
    if (!c.pass) {
      CHECK(c.name.find("error:") != std::string::npos);
      CHECK(std::isinf(c.error));
      ++refused;
    }
  CHECK(refused == 2);
}

TEST_CASE("full suite includes the Laplace cross-check") {
  const auto checks = consistency_suite(1.8, false);
  int laplace = 0;
  for (const auto& c : checks) {
    laplace += c.name.find("Laplace transform") != std::string::npos;
    CHECK(c.pass);
  }
  CHECK(laplace == 2);
}
