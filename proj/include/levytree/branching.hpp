#pragma once

#include "levytree/common.hpp"

namespace levytree {

// gamma in (1, 2] with the constants every formula below needs.
struct StableIndex {
  double gamma;
  double delta;      // 1 - 1/gamma
  double c_gamma;    // 1 / (gamma * Gamma_e(delta))
  double psi_delta;  // digamma(delta)

  explicit StableIndex(double g);
};

struct SolverConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-14;
  int max_iter = 200;
  double series_cutoff = 0.9;  // branch on X = w^{-gamma}
};

// N(Gamma > t) = ((gamma - 1) t)^{-1/(gamma - 1)}
double v(double t, const StableIndex& s);

// F(x) = int_x^inf du / (u^gamma - 1), x > 1.
double F(double x, const StableIndex& s, const SolverConfig& cfg = {});
// Same, as a function of u = x - 1 (accurate for small u).
double F_shifted(double u, const StableIndex& s, const SolverConfig& cfg = {});
// Plain power series (1/gamma) x^{1-gamma} sum_n x^{-gamma n}/(n + delta),
// summed until terms drop below 1e-17 or max_terms is hit.
double F_series(double x, const StableIndex& s, long max_terms = 10'000'000);

// w(y) > 1 solving F(w) = y.
double w(double y, const StableIndex& s, const SolverConfig& cfg = {});
// phi(y) = w(y) - 1 without cancellation for large y.
double phi(double y, const StableIndex& s, const SolverConfig& cfg = {});
// w_lambda(a) = lambda^{1/gamma} w(a lambda^{(gamma-1)/gamma})
double w_lambda(double a, double lambda, const StableIndex& s, const SolverConfig& cfg = {});
// y0 with phi(y0) = 1
double y0(const StableIndex& s, const SolverConfig& cfg = {});

// C0 = -log(gamma) - Euler gamma - digamma(1 - 1/gamma): the constant with
// gamma F(1 + u) = C0 - log u + o(1) as u -> 0.
double C0_closed(const StableIndex& s);

}  // namespace levytree
