#pragma once

#include <string>
#include <vector>

#include "levytree/branching.hpp"
#include "levytree/stablefn.hpp"

namespace levytree {

// Laws under the excursion measure N, Psi(lambda) = lambda^gamma.
// N(D > 2r) = v - Psi(v)^2 int_v^inf dl/Psi(l)^2 with v = v(r)
double diam_tail_N(double r, double gamma);
// Density of D under N: -d/dr N(D > 2r) = 2 diam_density(2r).
double diam_density(double s, double gamma);
// N(D <= y | Gamma = r): 0 for y <= r, 1 for y >= 2r.
double cond_diam_given_height(double y, double r, double gamma);

// Joint Laplace law of (D, Gamma) under N_nr; y, z >= 0 not both 0.
double L1(double y, double z, double gamma, const SolverConfig& cfg = {});
double L_lambda(double y, double z, double lambda, double gamma, const SolverConfig& cfg = {});
// L1(y, 0) = sum_{n >= 2} (n gamma_n y + delta_n) e^{-gamma n y}, truncated at N.
double L1_diag_series(double y, double gamma, int N = 60);

// Brownian closed forms under N_nr.
double brownian_height_tail(double r);  // N(Gamma > r)
double brownian_height_cdf(double r);   // N(Gamma <= r), fast for small r
double brownian_diam_tail(double r);    // N(D > r)
double brownian_diam_cdf(double r);     // N(D <= r), fast for small r
// Leading prefactors of the two small-r series: 4 pi^{5/2} and 2^{12} pi^{13/2}/3.
double brownian_height_cdf_prefactor();
double brownian_diam_cdf_prefactor();

enum class TailKind { height, diam };

struct TailConfig {
  QuadratureConfig quad;
  double term_tol = 1e-16;   // drop terms below this (on the N_nr scale)
  double accuracy = 1e-10;   // refuse when the error estimate is larger
  double term_rel_err = 1e-13;  // relative error charged to every evaluated term
  int max_terms = 300;
  double brownian_switch = 0.6;  // gamma = 2: Jacobi-transformed form below this (r for height, r/2 for diam)
};

struct TailValue {
  double value = 0;
  double error = 0;  // estimate
  int terms = 0;
  std::string method;  // "series", "brownian_cdf"
};

// N_nr(Gamma > r) from sum_n beta_n xi(nr)/c_gamma.
// gamma < 2 and r below the accuracy radius: UnsupportedError naming the small-r asymptote.
TailValue nr_height_tail_eval(double r, double gamma, const TailConfig& cfg = {});
double nr_height_tail(double r, double gamma, const TailConfig& cfg = {});
// N_nr(D > r) from sum_n gamma_n xi_bar(nr/2) + delta_n xi(nr/2), over c_gamma.
TailValue nr_diam_tail_eval(double r, double gamma, const TailConfig& cfg = {});
double nr_diam_tail(double r, double gamma, const TailConfig& cfg = {});
// Smallest r (to 1%) at which the series meets cfg.accuracy; empirical.
double nr_series_min_radius(double gamma, TailKind kind, const TailConfig& cfg = {});

// Small-r leading asymptotes of N_nr(Gamma <= r) and N_nr(D <= r); gamma = 2 uses the
// Brownian leading terms.
double height_cdf_asymptote(double r, double gamma);
double diam_cdf_asymptote(double r, double gamma);

// Large-r normalizations that tend to 1:
// r^{-1-gamma/2} e^{r^gamma} N_nr(Gamma > r (gamma-1)^{-(gamma-1)/gamma}) / C1
double height_tail_normalized(double r, double gamma, const TailConfig& cfg = {});
// r^{-1-3gamma/2} e^{r^gamma} N_nr(D > r (gamma-1)^{-(gamma-1)/gamma}) / C2
double diam_tail_normalized(double r, double gamma, const TailConfig& cfg = {});

enum class MomentMethod { quadrature, series };
double moment_height(double gamma, MomentMethod method = MomentMethod::quadrature);
double moment_diam(double gamma, MomentMethod method = MomentMethod::quadrature);
// Integrand W(x) of the diameter moment, x > 1.
double moment_diam_integrand(double x, double gamma);
// The series route sums int_X^inf W in closed form; exposed for tests.
double moment_diam_tail(double X, double gamma);

struct MomentReport {
  double gamma;
  double mean_height, mean_diam, ratio;
  double mean_height_series, mean_diam_series;
  std::string height_method = "quadrature", diam_method = "quadrature";
};
MomentReport moments(double gamma);

struct LaplacePoint {
  double lambda;
  double height_lhs, height_rhs, height_rel_err;
  double diam_lhs, diam_rhs, diam_rel_err;
};
struct LaplaceReport {
  double gamma;
  std::vector<LaplacePoint> points;
  double max_rel_err_height = 0, max_rel_err_diam = 0;
  double r_min_height = 0, r_min_diam = 0;  // below these the small-r asymptote stands in
  double neglected_mass = 0;  // largest asymptote value used in place of the series
  bool truncation_warning = false;
};
// Forward Laplace transforms of the tail series against the w-based closed forms.
LaplaceReport laplace_crosscheck(double gamma, const std::vector<double>& lambdas,
                                 const TailConfig& cfg = {});

struct Table1Row {
  double r;
  double height_large, diam_large;  // -log N_nr(Gamma > r), -log N_nr(D > r) as r -> inf
  double height_small, diam_small;  // -log N_nr(Gamma <= r), -log N_nr(D <= r) as r -> 0
};
struct Table1Report {
  double gamma;
  std::vector<Table1Row> rows;
  double lambda_cr;
  double C_small, Cprime_small;  // NaN at gamma = 2
  double brownian_height_prefactor, brownian_diam_prefactor;
};
Table1Report table1_report(double gamma, const std::vector<double>& grid);

// Curves over a grid; kind is height_tail, diam_tail, diam_density or joint
// (joint: L1(r, z) at fixed z). threads <= 0 uses default_threads().
struct TailCurve {
  std::vector<double> grid, values;
  std::string kind;
};
TailCurve tail_curve(const std::string& kind, double gamma, const std::vector<double>& grid,
                     double z = 0, int threads = 0, const TailConfig& cfg = {});

}  // namespace levytree
