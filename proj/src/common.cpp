#include "levytree/common.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

namespace levytree {

void check_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma <= 2.0)) throw DomainError("gamma must lie in (1, 2]");
}

int default_threads() {
  if (const char* env = std::getenv("LEVYTREE_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace levytree
