#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "levytree/coeffs.hpp"
#include "levytree/stablefn.hpp"

using namespace levytree;

namespace {
const double kPi = 3.14159265358979323846;

double integrate_0_inf(const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double a = ts.integrate(f, 0.0, 1.0, 1e-12);
  double b = es.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-12);
  return a + b;
}

double s2(double x) { return std::exp(-1 / x) / std::sqrt(kPi) * std::pow(x, -1.5); }
double s2p(double x) { return std::exp(-1 / x) / std::sqrt(kPi) * (std::pow(x, -3.5) - 1.5 * std::pow(x, -2.5)); }
}  // namespace

TEST_CASE("m_gamma") {
  CHECK(m_gamma(0, 2.0) == doctest::Approx(1.0));
  CHECK(m_gamma(0, 1.5) == doctest::Approx(std::pow(0.5, 0.5)));
  CHECK_THROWS_AS(m_gamma(kPi, 1.5), DomainError);
  CHECK_THROWS_AS(m_gamma(-0.1, 1.5), DomainError);
  for (double g : {1.2, 1.5, 1.9}) {
    double v = 1e-3;
    double ratio = m_gamma(v, g) / m_gamma(0, g);
    CHECK((ratio - 1) / (v * v) == doctest::Approx((g - 1) / (2 * g)).epsilon(1e-5));
    double prev = m_gamma(0, g);
    for (int i = 1; i < 200; ++i) {
      double m = m_gamma(kPi * i / 200, g);
      CHECK(m > prev);
      prev = m;
    }
  }
  double direct = std::pow(1.5 * std::sin(kPi / 6), 0.5) * 1.5 * std::sin(kPi / 3);
  CHECK(m_gamma(kPi / 2, 1.5) == doctest::Approx(direct).epsilon(1e-15));
  CHECK(m_gamma(kPi / 2, 1.5) > m_gamma(kPi / 3, 1.5));
}

TEST_CASE("closed forms at gamma = 2") {
  CHECK(s_gamma(1.0, 2.0) == doctest::Approx(0.207554).epsilon(1e-5));
  for (double x : {0.02, 0.1, 0.5, 1.0, 3.0, 12.0, 50.0, 1e4}) {
    CHECK(s_gamma(x, 2.0) == doctest::Approx(s2(x)).epsilon(1e-12));
    CHECK(s_gamma_prime(x, 2.0) == doctest::Approx(s2p(x)).epsilon(1e-11));
  }
  CHECK(xi(1.0, 2.0) == doctest::Approx(0.103777).epsilon(1e-5));
  CHECK(xi_bar(2.0, 2.0) == doctest::Approx(0.103335).epsilon(1e-5));
  for (double r : {0.3, 0.8, 1.5, 2.5, 4.0}) {
    CHECK(xi(r, 2.0) == doctest::Approx((2 * r * r - 1) * std::exp(-r * r) / std::sqrt(4 * kPi)).epsilon(1e-10));
    CHECK(xi_bar(r, 2.0) == doctest::Approx(r * r * (r * r - 1.5) * std::exp(-r * r) / std::sqrt(kPi)).epsilon(1e-10));
  }
}

TEST_CASE("quadrature and large-x series agree") {
  QuadratureConfig quad;
  quad.series_switch = std::numeric_limits<double>::infinity();
  for (double g : {1.1, 1.3, 1.5, 1.8, 2.0}) {
    double X = default_series_switch(g);
    for (double x : {0.5 * X, X, 3 * X}) {
      CHECK(s_gamma(x, g, quad) == doctest::Approx(large_x_series(x, g, 0)).epsilon(1e-12));
      CHECK(s_gamma_prime(x, g, quad) == doctest::Approx(large_x_series(x, g, 1)).epsilon(1e-12));
      CHECK(theta(x, g, quad) == doctest::Approx(large_x_series(x, g, 1 / g)).epsilon(1e-11));
    }
  }
}

TEST_CASE("normalization and Laplace identities") {
  for (double g : {1.3, 1.5, 1.8, 2.0}) {
    const double al = (g - 1) / g;
    CHECK(integrate_0_inf([&](double x) { return s_gamma(x, g); }) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(integrate_0_inf([&](double x) { return theta(x, g); })) < 1e-6);
    for (double lam : {0.5, 1.0, 2.0, 5.0}) {
      double e = std::exp(-g * std::pow(lam, al));
      double Ls = integrate_0_inf([&](double x) { return std::exp(-lam * x) * s_gamma(x, g); });
      double Lt = integrate_0_inf([&](double x) { return std::exp(-lam * x) * theta(x, g); });
      double Lp = integrate_0_inf([&](double x) { return std::exp(-lam * x) * s_gamma_prime(x, g); });
      CHECK(std::abs(Ls - e) < 1e-6);
      CHECK(std::abs(Lt - std::pow(lam, 1 / g) * e) < 1e-6);
      CHECK(std::abs(Lp - lam * e) < 1e-6);
    }
  }
  double L = integrate_0_inf([](double x) { return std::exp(-2 * x) * s_gamma(x, 1.5); });
  CHECK(L == doctest::Approx(std::exp(-1.5 * std::cbrt(2.0))).epsilon(1e-9));
  double Lt = integrate_0_inf([](double x) { return std::exp(-x) * theta(x, 1.5); });
  CHECK(Lt == doctest::Approx(std::exp(-1.5)).epsilon(1e-9));
}

TEST_CASE("s' against finite differences and its sign") {
  for (double g : {1.3, 1.5, 1.8}) {
    for (double x : {0.5, 0.2, 2.0}) {
      double h = 1e-6;
      double fd = (s_gamma(x + h, g) - s_gamma(x - h, g)) / (2 * h);
      CHECK(s_gamma_prime(x, g) == doctest::Approx(fd).epsilon(1e-5));
    }
    int changes = 0;
    const double x0 = default_small_x_switch(g), span = 1e4 / x0;
    double prev = s_gamma_prime(x0, g);
    CHECK(prev > 0);
    for (int i = 1; i <= 150; ++i) {
      double cur = s_gamma_prime(x0 * std::pow(span, i / 150.0), g);
      if ((cur > 0) != (prev > 0)) ++changes;
      prev = cur;
    }
    CHECK(prev < 0);
    CHECK(changes == 1);
  }
}

TEST_CASE("small-x expansions") {
  // gamma = 2: S = (1), T = (1, -3/2), V = (1, -1/2) are exact
  for (double x : {0.01, 0.05, default_small_x_switch(2.0), 0.3, 1.0}) {
    CHECK(s_asymptotic(x, 2.0, {1}) == doctest::Approx(s_gamma(x, 2.0)).epsilon(1e-12));
    CHECK(s_prime_asymptotic(x, 2.0, {1, -1.5}) == doctest::Approx(s_gamma_prime(x, 2.0)).epsilon(1e-11));
    CHECK(theta_asymptotic(x, 2.0, {1, -0.5}) == doctest::Approx(theta(x, 2.0)).epsilon(1e-10));
  }
  // leading order for gamma < 2: the ratio tends to 1 linearly in x^{gamma-1}
  for (double g : {1.3, 1.5, 1.8}) {
    auto dev = [&](double x, auto f, auto a) { return std::abs(f(x) / a(x) - 1); };
    auto sf = [&](double x) { return s_gamma(x, g); };
    auto sa = [&](double x) { return s_asymptotic(x, g, {1}); };
    auto tf = [&](double x) { return theta(x, g); };
    auto ta = [&](double x) { return theta_asymptotic(x, g, {1}); };
    double x1 = default_small_x_switch(g), x2 = x1 * std::pow(0.5, 1 / (g - 1));
    // halving u = (x/(gamma-1))^{gamma-1} roughly halves the deviation
    CHECK(dev(x2, sf, sa) / dev(x1, sf, sa) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(dev(x2, tf, ta) / dev(x1, tf, ta) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(dev(x1, sf, sa) < 0.2);
  }
}

TEST_CASE("J_a") {
  QuadratureConfig cfg;
  double x = 0.5;
  double q = J_a(x, 0, 2.0, cfg);
  for (int p : {1, 2, 4}) CHECK(J_a_recursion(x, 0, 2.0, p, cfg) == doctest::Approx(q).epsilon(1e-12));
  // J_0 at gamma = 2 is x e^{-1/x} - E_1(1/x), and E_1(z) = -Ei(-z)
  CHECK(q == doctest::Approx(x * std::exp(-1 / x) + std::expint(-1 / x)).epsilon(1e-12));
  for (double g : {1.3, 1.7}) {
    double a = 0.4;
    CHECK(c_q(0, a, g) == doctest::Approx(std::pow(g - 1, -g)));
    CHECK(c_q(1, a, g) == doctest::Approx(-std::pow(g - 1, -2 * g) * (a + 1 + (g - 1))));
    for (double y : {0.05, 0.2, 1.0}) CHECK(J_a_recursion(y, a, g, 3, cfg) == doctest::Approx(J_a(y, a, g, cfg)).epsilon(1e-10));
    // points with b(y) = 40 and 80; the relative correction is about (a + g)/((g - 1) b)
    double y1 = (g - 1) * std::pow(40.0, -1 / (g - 1)), y2 = (g - 1) * std::pow(80.0, -1 / (g - 1));
    auto r = [&](double y) { return J_a(y, a, g, cfg) * std::exp(b_fn(y, g)) / std::pow(y, a + g); };
    CHECK(std::abs(r(y2) - c_q(0, a, g)) < std::abs(r(y1) - c_q(0, a, g)));
    CHECK(r(y2) == doctest::Approx(c_q(0, a, g)).epsilon(0.2));
  }
  CHECK_THROWS_AS(J_a_recursion(0.5, -1.5, 1.5, 2, cfg), DomainError);
  CHECK_THROWS_AS(J_a(-1, 0, 1.5, cfg), DomainError);
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(s_gamma(0, 1.5), DomainError);
  CHECK_THROWS_AS(theta(-1, 1.5), DomainError);
  CHECK_THROWS_AS(xi(0, 1.5), DomainError);
  CHECK_THROWS_AS(s_gamma(1, 2.5), DomainError);
  CHECK(s_gamma(1e-8, 1.5) == 0);
  CHECK(theta(1e-300, 1.5) == 0);
}
