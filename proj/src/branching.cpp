#include "levytree/branching.hpp"

#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

namespace levytree {

namespace {

constexpr double kEuler = boost::math::constants::euler<double>();

// sum_n X^n / (n + delta) times (1/gamma) X^delta
double series_in_X(double X, const StableIndex& s, long max_terms) {
  double sum = 0, p = 1;
  for (long n = 0; n < max_terms; ++n) {
    double term = p / (n + s.delta);
    sum += term;
    if (term < 1e-17 * sum) break;
    p *= X;
  }
  return std::pow(X, s.delta) * sum / s.gamma;
}

// R(X) = int_X^1 (v^{delta-1} - 1)/(1 - v) dv, for X bounded away from 0.
double R_tail(double t, const StableIndex& s) {
  // t = 1 - X
  if (t <= 0) return 0;
  auto g = [&](double q) {  // q = 1 - v in (0, t]
    if (q < 1e-300) return 1 - s.delta;
    return std::expm1((s.delta - 1) * std::log1p(-q)) / q;
  };
  return boost::math::quadrature::gauss<double, 30>::integrate(g, 0.0, t);
}

// gamma F expressed through u = log(1 - X)
double gammaF_near1(double u, const StableIndex& s) {
  return -u - s.psi_delta - kEuler - R_tail(std::exp(u), s);
}

double F_of_X(double X, double t, const StableIndex& s, const SolverConfig& cfg) {
  if (X <= cfg.series_cutoff) return series_in_X(X, s, 100000);
  return gammaF_near1(std::log(t), s) / s.gamma;
}

struct WSol {
  double w, phi;
};

WSol solve_w(double y, const StableIndex& s, const SolverConfig& cfg) {
  if (!(y > 0) || !std::isfinite(y)) throw DomainError("w: y must be positive and finite");
  const double c = cfg.series_cutoff;
  const double yc = series_in_X(c, s, 100000);
  const int digits = std::numeric_limits<double>::digits - 4;
  std::uintmax_t it = static_cast<std::uintmax_t>(cfg.max_iter);
  if (y <= yc) {
    // unknown z = log X, X <= c
    const double g1 = s.gamma - 1;
    double zhi = std::min(std::log(c), std::log(g1 * y) / s.delta);
    double zlo = std::log(g1 * (1 - c) * y) / s.delta;
    auto f = [&](double z) {
      double X = std::exp(z);
      double val = series_in_X(X, s, 100000) - y;
      double der = std::pow(X, s.delta) / (1 - X) / s.gamma;
      return std::make_pair(val, der);
    };
    double z = boost::math::tools::newton_raphson_iterate(f, zhi, zlo, zhi, digits, it);
    if (it >= static_cast<std::uintmax_t>(cfg.max_iter)) throw SolverError("w: Newton did not converge", zlo, zhi);
    return {std::exp(-z / s.gamma), std::expm1(-z / s.gamma)};
  }
  // unknown u = log(1 - X), X > c
  const double gc = std::expm1((s.delta - 1) * std::log(c)) / (1 - c);
  double uhi = std::min(std::log1p(-c), -s.gamma * y - s.psi_delta - kEuler);
  double ulo = uhi - (1 - c) * gc - 1e-3;
  auto f = [&](double u) {
    double t = std::exp(u);
    double val = gammaF_near1(u, s) / s.gamma - y;
    double der = -std::exp((s.delta - 1) * std::log1p(-t)) / s.gamma;
    return std::make_pair(val, der);
  };
  double u = boost::math::tools::newton_raphson_iterate(f, uhi, ulo, uhi, digits, it);
  if (it >= static_cast<std::uintmax_t>(cfg.max_iter)) throw SolverError("w: Newton did not converge", ulo, uhi);
  double lg = -std::log1p(-std::exp(u)) / s.gamma;
  return {std::exp(lg), std::expm1(lg)};
}

}  // namespace

StableIndex::StableIndex(double g) : gamma(g) {
  check_gamma(g);
  delta = 1 - 1 / g;
  c_gamma = 1 / (g * boost::math::tgamma(delta));
  psi_delta = boost::math::digamma(delta);
}

double v(double t, const StableIndex& s) {
  if (!(t > 0)) throw DomainError("v: t must be positive");
  return std::pow((s.gamma - 1) * t, -1 / (s.gamma - 1));
}

double F(double x, const StableIndex& s, const SolverConfig& cfg) {
  if (!(x > 1)) throw DomainError("F: x must exceed 1");
  double lx = std::log(x);
  double X = std::exp(-s.gamma * lx);
  double t = -std::expm1(-s.gamma * lx);
  return F_of_X(X, t, s, cfg);
}

double F_shifted(double u, const StableIndex& s, const SolverConfig& cfg) {
  if (!(u > 0)) throw DomainError("F: x must exceed 1");
  double lx = std::log1p(u);
  double X = std::exp(-s.gamma * lx);
  double t = -std::expm1(-s.gamma * lx);
  return F_of_X(X, t, s, cfg);
}

double F_series(double x, const StableIndex& s, long max_terms) {
  if (!(x > 1)) throw DomainError("F: x must exceed 1");
  return series_in_X(std::pow(x, -s.gamma), s, max_terms);
}

double w(double y, const StableIndex& s, const SolverConfig& cfg) { return solve_w(y, s, cfg).w; }

double phi(double y, const StableIndex& s, const SolverConfig& cfg) { return solve_w(y, s, cfg).phi; }

double w_lambda(double a, double lambda, const StableIndex& s, const SolverConfig& cfg) {
  if (!(a > 0) || !(lambda > 0)) throw DomainError("w_lambda: a and lambda must be positive");
  return std::pow(lambda, 1 / s.gamma) * w(a * std::pow(lambda, s.delta), s, cfg);
}

double y0(const StableIndex& s, const SolverConfig& cfg) { return F(2.0, s, cfg); }

double C0_closed(const StableIndex& s) { return -std::log(s.gamma) - kEuler - s.psi_delta; }

}  // namespace levytree
