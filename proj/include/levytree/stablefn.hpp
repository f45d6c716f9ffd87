#pragma once

#include <limits>
#include <vector>

#include "levytree/common.hpp"

namespace levytree {

struct QuadratureConfig {
  double abs_tol = 0;
  double rel_tol = 1e-12;
  int max_subdivisions = 15;  // tanh-sinh refinement levels
  // x below which the asymptotic branch may be used; 0 means b(x) = 35.
  double small_x_switch = 0;
  // x above which the convergent large-x series replaces quadrature;
  // 0 means the default, +inf disables the series.
  double series_switch = 0;
};

// b(x) = ((gamma - 1)/x)^{gamma - 1}
double b_fn(double x, double gamma);
double default_small_x_switch(double gamma);
double default_series_switch(double gamma);

// m(v) = (gamma sin((gamma-1)v/gamma)/sin v)^{gamma-1} gamma sin(v/gamma)/sin v on [0, pi)
double m_gamma(double v, double gamma);

// Density of the stable law with Laplace transform exp(-gamma lambda^{(gamma-1)/gamma}).
double s_gamma(double x, double gamma, const QuadratureConfig& cfg = {});
double s_gamma_prime(double x, double gamma, const QuadratureConfig& cfg = {});
// theta(x) = (gamma-1) s(x)/x - ((gamma-1)/gamma) x^{-1-1/gamma} int_0^x y^{1/gamma-1} s(y) dy
double theta(double x, double gamma, const QuadratureConfig& cfg = {});
// int_0^x y^{1/gamma - 1} s(y) dy
double theta_inner(double x, double gamma, const QuadratureConfig& cfg = {});

// xi(r) = r^{-(gamma+1)/(gamma-1)} theta(r^{-gamma/(gamma-1)}), xi_bar the same with s'.
double xi(double r, double gamma, const QuadratureConfig& cfg = {});
double xi_bar(double r, double gamma, const QuadratureConfig& cfg = {});

// Inverse Laplace transform of lambda^nu exp(-gamma lambda^{(gamma-1)/gamma}) as the
// convergent series in x^{-(gamma-1)/gamma}; nu = 0, 1/gamma, 1 give s, theta, s'.
double large_x_series(double x, double gamma, double nu, int max_terms = 400);

// Small-x expansions with caller-supplied coefficients (S, V or T; c[0] = 1).
double s_asymptotic(double x, double gamma, const std::vector<double>& S);
double theta_asymptotic(double x, double gamma, const std::vector<double>& V);
double s_prime_asymptotic(double x, double gamma, const std::vector<double>& T);

// J_a(x) = int_0^x y^a e^{-b(y)} dy by quadrature.
double J_a(double x, double a, double gamma, const QuadratureConfig& cfg = {});
// c_q(a, gamma) of the integration-by-parts expansion; c_0 = (gamma-1)^{-gamma}.
double c_q(int q, double a, double gamma);
// p-step expansion plus quadrature remainder; throws if a step hits a + gamma = 0.
double J_a_recursion(double x, double a, double gamma, int p, const QuadratureConfig& cfg = {});

}  // namespace levytree
