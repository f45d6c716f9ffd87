#include <cmath>
#include <random>

#include "doctest.h"
#include "levytree/branching.hpp"

using namespace levytree;

namespace {
const double kPi = 3.14159265358979323846;
double coth(double y) { return 1 / std::tanh(y); }
}  // namespace

TEST_CASE("stable index constants") {
  StableIndex s2(2.0);
  CHECK(s2.c_gamma == doctest::Approx(1 / std::sqrt(4 * kPi)).epsilon(1e-14));
  StableIndex s(1.5);
  CHECK(s.c_gamma == doctest::Approx(1 / (1.5 * std::tgamma(0.5 / 1.5))).epsilon(1e-14));
  CHECK_THROWS_AS(StableIndex(1.0), DomainError);
  CHECK_THROWS_AS(StableIndex(2.1), DomainError);
  CHECK(C0_closed(s2) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("v") {
  StableIndex s2(2.0);
  CHECK(v(1.0, s2) == doctest::Approx(1.0));
  CHECK(v(0.5, s2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(v(0.0, s2), DomainError);
  for (double g : {1.2, 1.5, 1.9}) {
    StableIndex s(g);
    for (double t : {0.3, 1.0, 4.0}) {
      double h = 1e-6;
      double fd = (v(t + h, s) - v(t - h, s)) / (2 * h);
      CHECK(fd == doctest::Approx(-std::pow(v(t, s), g)).epsilon(1e-7));
    }
  }
}

TEST_CASE("w at gamma = 2 is coth") {
  StableIndex s(2.0);
  CHECK(w(1.0, s) == doctest::Approx(1.3130352854993312).epsilon(1e-14));
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    double y = 0.05 * std::pow(15 / 0.05, i / 199.0);
    worst = std::max(worst, std::abs(w(y, s) - coth(y)) / coth(y));
  }
  CHECK(worst < 1e-12);
  CHECK(phi(10.0, s) / (2 * std::exp(-20.0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(phi(1.0, s) == doctest::Approx(0.3130352854993312).epsilon(1e-13));
}

TEST_CASE("F") {
  StableIndex s2(2.0);
  CHECK(F(2.0, s2) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  CHECK(F(1.0001, s2) == doctest::Approx(0.5 * std::log(2.0001 / 0.0001)).epsilon(1e-13));
  CHECK_THROWS_AS(F(1.0, s2), DomainError);
  for (double g : {1.1, 1.5, 1.9}) {
    StableIndex s(g);
    double x = 1e6;
    CHECK(F(x, s) / (std::pow(x, 1 - g) / (g - 1)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("series branch and near-one branch agree") {
  for (double g : {1.1, 1.3, 1.5, 1.8, 2.0}) {
    StableIndex s(g);
    SolverConfig lo, hi;
    lo.series_cutoff = 0.5;
    hi.series_cutoff = 0.95;
    for (double x : {1.03, 1.1, 1.3, 1.6, 2.5}) CHECK(F(x, s, lo) == doctest::Approx(F(x, s, hi)).epsilon(1e-14));
    for (double y : {0.01, 0.3, 1.0, 3.0, 8.0}) CHECK(w(y, s, lo) == doctest::Approx(w(y, s, hi)).epsilon(1e-13));
  }
}

TEST_CASE("w solves the defining integral equation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ly(std::log(1e-3), std::log(20.0));
  for (double g : {1.1, 1.3, 1.5, 1.8, 2.0}) {
    StableIndex s(g);
    for (int i = 0; i < 200; ++i) {
      double y = std::exp(ly(rng));
      double u = phi(y, s);
      CHECK(std::abs(F_shifted(u, s) - y) <= 1e-12 * std::max(1.0, y));
    }
  }
}

TEST_CASE("forward substitution through the plain series") {
  StableIndex s(1.5);
  for (double y : {0.01, 0.2, 0.7, 1.5, 2.5}) {
    double x = w(y, s);
    CHECK(F_series(x, s) == doctest::Approx(y).epsilon(1e-10));
  }
}

TEST_CASE("ODE, monotonicity and bounds") {
  for (double g : {1.1, 1.3, 1.5, 1.8, 2.0}) {
    StableIndex s(g);
    double prev = INFINITY;
    for (int i = 0; i < 60; ++i) {
      double y = 1e-3 * std::pow(2e4, i / 59.0);
      double wy = w(y, s);
      CHECK(wy < prev);
      prev = wy;
      CHECK(wy > v(y, s) * (1 - 1e-14));
      CHECK(wy <= (v(y, s) + 1) * (1 + 1e-12));
      if (y < 15) {
        double h = y > 0.1 ? 1e-5 : 1e-5 * y;
        double fd = (w(y + h, s) - w(y - h, s)) / (2 * h);
        CHECK(fd == doctest::Approx(-(std::pow(wy, g) - 1)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("w_lambda") {
  StableIndex s2(2.0);
  CHECK(w_lambda(0.7, 1.0, s2) == doctest::Approx(w(0.7, s2)).epsilon(1e-15));
  CHECK(w_lambda(1.0, 4.0, s2) == doctest::Approx(2 * coth(2.0)).epsilon(1e-13));
  StableIndex s(1.5);
  double prev = 0;
  for (double lam : {1.0, 1e-1, 1e-2, 1e-4, 1e-6}) {
    double val = w_lambda(0.8, lam, s);
    if (prev > 0) CHECK(val < prev);
    prev = val;
  }
  CHECK(prev == doctest::Approx(v(0.8, s)).epsilon(1e-3));
  for (double lam : {0.5, 2.0, 7.0}) {
    double a = 0.6, h = 1e-6;
    double fd = (w_lambda(a + h, lam, s) - w_lambda(a - h, lam, s)) / (2 * h);
    CHECK(fd == doctest::Approx(lam - std::pow(w_lambda(a, lam, s), 1.5)).epsilon(1e-6));
  }
}

TEST_CASE("phi and y0") {
  StableIndex s2(2.0);
  CHECK(y0(s2) == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-14));
  for (double g : {1.2, 1.5, 2.0}) {
    StableIndex s(g);
    CHECK(phi(y0(s), s) == doctest::Approx(1.0).epsilon(1e-13));
    double y = 20;
    CHECK(phi(y, s) / std::exp(C0_closed(s) - g * y) == doctest::Approx(1.0).epsilon(1e-6));
  }
}
