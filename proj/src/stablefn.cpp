#include "levytree/stablefn.hpp"

#include <cmath>
#include <string>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

namespace levytree {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kUnderflow = 745;

boost::math::quadrature::tanh_sinh<double>& ts(int levels) {
  thread_local boost::math::quadrature::tanh_sinh<double> q(15);
  thread_local boost::math::quadrature::tanh_sinh<double> deep(20);
  return levels <= 15 ? q : deep;
}

template <class F>
double integrate(const char* what, F f, double a, double b, const QuadratureConfig& cfg) {
  double err = 0, L1 = 0;
  std::size_t levels = 0;
  double tol = std::max(cfg.rel_tol, 1e-15);
  double val = ts(cfg.max_subdivisions).integrate(f, a, b, tol, &err, &L1, &levels);
  if (!std::isfinite(val) || err > std::max(cfg.abs_tol, 1e-7 * L1))
    throw QuadratureError(std::string(what) + ": quadrature did not converge", val, err);
  return val;
}

void check_x(double x, const char* what) {
  if (!(x > 0) || std::isnan(x)) throw DomainError(std::string(what) + ": x must be positive");
}

double series_switch(double gamma, const QuadratureConfig& cfg) {
  return cfg.series_switch > 0 ? cfg.series_switch : default_series_switch(gamma);
}

// m(v) with vc the distance to the nearer endpoint of [0, pi] (signed as boost passes it)
double m_eval(double v, double vc, double g) {
  double sv = v > kPi / 2 ? std::sin(vc) : std::sin(v);
  double r1 = g * std::sin((g - 1) * v / g) / sv;
  double r2 = g * std::sin(v / g) / sv;
  return std::pow(r1, g - 1) * r2;
}

// Shared integral int_0^pi m^k e^{-eps (m - m0)} (p0 + p1 eps m) dv
double scaled_integral(const char* what, double eps, double g, double k, double p0, double p1,
                       const QuadratureConfig& cfg) {
  const double m0 = std::pow(g - 1, g - 1);
  auto f = [&](double v, double vc) {
    if (v <= 0) return std::pow(m0, k) * (p0 + p1 * eps * m0);
    double m = m_eval(v, vc, g);
    if (!std::isfinite(m)) return 0.0;
    double e = std::exp(-eps * (m - m0));
    if (e == 0) return 0.0;
    return std::pow(m, k) * e * (p0 + p1 * eps * m);
  };
  return integrate(what, f, 0.0, kPi, cfg);
}

}  // namespace

double b_fn(double x, double gamma) { return std::pow((gamma - 1) / x, gamma - 1); }

double default_small_x_switch(double gamma) {
  check_gamma(gamma);
  return (gamma - 1) * std::pow(35.0, -1 / (gamma - 1));
}

double default_series_switch(double gamma) {
  check_gamma(gamma);
  double alpha = (gamma - 1) / gamma;
  return std::pow(2 * gamma, 1 / alpha);
}

double m_gamma(double v, double gamma) {
  check_gamma(gamma);
  if (!(v >= 0 && v < kPi)) throw DomainError("m_gamma: v must lie in [0, pi)");
  if (v == 0) return std::pow(gamma - 1, gamma - 1);
  return m_eval(v, kPi - v, gamma);
}

double large_x_series(double x, double gamma, double nu, int max_terms) {
  check_gamma(gamma);
  check_x(x, "large_x_series");
  const double alpha = (gamma - 1) / gamma, lx = std::log(x), lg = std::log(gamma);
  double sum = 0;
  for (int k = 0; k < max_terms; ++k) {
    double z = k * alpha + nu;
    // (-gamma)^k/k! x^{-z-1}/Gamma(-z), with 1/Gamma(-z) = -sin(pi z) Gamma(z+1)/pi
    double sp = boost::math::sin_pi(z);
    double mag = std::exp(k * lg - std::lgamma(k + 1.0) + std::lgamma(z + 1) - (z + 1) * lx) / kPi;
    double term = (k % 2 ? 1.0 : -1.0) * sp * mag;
    sum += term;
    if (k > 2 && mag < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double s_gamma(double x, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "s_gamma");
  if (x >= series_switch(gamma, cfg)) return large_x_series(x, gamma, 0);
  const double g = gamma, eps = std::pow(x, 1 - g), b = b_fn(x, g);
  if (b > kUnderflow + 50) return 0;
  double I = scaled_integral("s_gamma", eps, g, 1, 1, 0, cfg);
  return (g - 1) / kPi * std::exp(-g * std::log(x) - b) * I;
}

double s_gamma_prime(double x, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "s_gamma_prime");
  if (x >= series_switch(gamma, cfg)) return large_x_series(x, gamma, 1);
  const double g = gamma, eps = std::pow(x, 1 - g), b = b_fn(x, g);
  if (b > kUnderflow + 50) return 0;
  double I = scaled_integral("s_gamma_prime", eps, g, 1, -g, g - 1, cfg);
  return (g - 1) / kPi * std::exp(-(g + 1) * std::log(x) - b) * I;
}

double theta_inner(double x, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "theta_inner");
  // Fubini: (1/pi) int_0^pi m^{-1/gamma} Gamma(1 + 1/gamma, eps m) dv
  const double g = gamma, eps = std::pow(x, 1 - g), a = 1 + 1 / g;
  auto f = [&](double v, double vc) {
    double m = v <= 0 ? std::pow(g - 1, g - 1) : m_eval(v, vc, g);
    if (!std::isfinite(m)) return 0.0;
    double z = eps * m;
    if (z > kUnderflow) return 0.0;
    return std::pow(m, -1 / g) * boost::math::tgamma(a, z);
  };
  return integrate("theta_inner", f, 0.0, kPi, cfg) / kPi;
}

double theta(double x, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "theta");
  if (x >= series_switch(gamma, cfg)) return large_x_series(x, gamma, 1 / gamma);
  const double g = gamma;
  if (b_fn(x, g) > kUnderflow + 50) return 0;
  double hp = (g - 1) * s_gamma(x, g, cfg) / x;
  double hm = (g - 1) / g * std::pow(x, -1 - 1 / g) * theta_inner(x, g, cfg);
  return hp - hm;
}

double xi(double r, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  if (!(r > 0)) throw DomainError("xi: r must be positive");
  const double g = gamma;
  return std::pow(r, -(g + 1) / (g - 1)) * theta(std::pow(r, -g / (g - 1)), g, cfg);
}

double xi_bar(double r, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  if (!(r > 0)) throw DomainError("xi_bar: r must be positive");
  const double g = gamma;
  return std::pow(r, -(g + 1) / (g - 1)) * s_gamma_prime(std::pow(r, -g / (g - 1)), g, cfg);
}

namespace {
double asymptotic(double x, double g, const std::vector<double>& c, double power) {
  check_gamma(g);
  check_x(x, "asymptotic expansion");
  if (c.empty()) throw DomainError("asymptotic expansion: empty coefficient list");
  const double X = x / (g - 1), u = std::pow(X, g - 1);
  double sum = 0;
  for (std::size_t n = c.size(); n-- > 0;) sum = sum * u + c[n];
  double pref = std::exp(-power * std::log(X) - 1 / u) / std::sqrt(2 * kPi * (1 - 1 / g));
  return pref * sum;
}
}  // namespace

double s_asymptotic(double x, double gamma, const std::vector<double>& S) {
  return asymptotic(x, gamma, S, (gamma + 1) / 2);
}

double theta_asymptotic(double x, double gamma, const std::vector<double>& V) {
  return asymptotic(x, gamma, V, (gamma + 3) / 2);
}

double s_prime_asymptotic(double x, double gamma, const std::vector<double>& T) {
  return asymptotic(x, gamma, T, (3 * gamma + 1) / 2);
}

double J_a(double x, double a, double gamma, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "J_a");
  const double g = gamma, bx = b_fn(x, g);
  // y = x t, scaled by x^{a+1} e^{-b(x)}: b(xt) - b(x) = b(x)(t^{1-g} - 1)
  auto f = [&](double t) {
    if (t <= 0) return 0.0;
    double d = bx * std::expm1((1 - g) * std::log(t));
    if (d > kUnderflow) return 0.0;
    return std::exp(a * std::log(t) - d);
  };
  double I = integrate("J_a", f, 0.0, 1.0, cfg);
  return std::exp((a + 1) * std::log(x) - bx) * I;
}

double c_q(int q, double a, double gamma) {
  check_gamma(gamma);
  if (q < 0) throw DomainError("c_q: q must be nonnegative");
  const double g = gamma;
  double prod = 1;
  for (int k = 1; k <= q; ++k) prod *= a + 1 + k * (g - 1);
  return (q % 2 ? -1.0 : 1.0) * std::pow(g - 1, -(q + 1) * g) * prod;
}

double J_a_recursion(double x, double a, double gamma, int p, const QuadratureConfig& cfg) {
  check_gamma(gamma);
  check_x(x, "J_a_recursion");
  if (p < 1) throw DomainError("J_a_recursion: p must be positive");
  const double g = gamma;
  for (int k = 1; k <= p; ++k)
    if (a + 1 + k * (g - 1) == 0) throw DomainError("J_a_recursion: a + gamma = 0 at some step; use J_a");
  const double eb = std::exp(-b_fn(x, g));
  double sum = 0;
  for (int q = 0; q < p; ++q) sum += c_q(q, a, g) * std::pow(x, a + g + q * (g - 1)) * eb;
  return sum + std::pow(g - 1, g) * c_q(p, a, g) * J_a(x, a + p * (g - 1), g, cfg);
}

}  // namespace levytree
