#pragma once

#include <vector>

#include "levytree/branching.hpp"
#include "levytree/common.hpp"

namespace levytree {

// Truncated power series sum_{k <= order} c[k] x^k.
class Series {
 public:
  Series() = default;
  explicit Series(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}
  Series(std::vector<double> coeffs, int order);

  static Series constant(double a, int order);
  static Series identity(int order);  // x

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return k <= order() ? c_[static_cast<std::size_t>(k)] : 0.0; }
  double& operator[](int k) { return c_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& coeffs() const { return c_; }
  double eval(double x) const;
  Series truncated(int order) const;

 private:
  std::vector<double> c_;
};

Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series operator*(double k, const Series& a);
Series exp(const Series& a);
Series log(const Series& a);
Series reciprocal(const Series& a);
Series real_pow(const Series& a, double alpha);
Series compose(const Series& outer, const Series& inner);  // inner[0] == 0
Series derivative(const Series& a);
Series integral(const Series& a);  // zero constant term

// Coefficients of the solution f(z) = sum_{n>=1} beta_n z^n of f = z H(f).
// Index 0 of the result is unused (0).
std::vector<double> lagrange_invert(const Series& H, int N);
// Same, by fixed-point iteration f <- z H(f) on truncated series.
std::vector<double> invert_by_iteration(const Series& H, int N);

// Quadrature of the defining integral of C0.
double C0(double gamma);

// S(u) = ((1+u)^gamma - 1 - gamma u)/(gamma u) and G(y) of the height series.
Series S_series(double gamma, int N);
Series G_series(double gamma, int N);
Series exp_G(double gamma, int N);

std::vector<double> beta_coeffs(double gamma, int N);
struct GammaDelta {
  std::vector<double> gamma_n;  // index n, entries 0 and 1 unused
  std::vector<double> delta_n;
};
GammaDelta gammadelta_coeffs(double gamma, int N);
// Same coefficients through H(f)^2 K(f) and H(f)^2 M(f); loses accuracy
// quickly with n and is kept as a cross-check for small n.
GammaDelta gammadelta_coeffs_composition(double gamma, int N);

// Recursions linking the expansion coefficients of s, theta and s'.
// Templated so gamma = 2 can be run in exact rational arithmetic.
template <class T>
std::vector<T> V_from_S(const std::vector<T>& S, const T& g) {
  if (S.empty() || S[0] != T(1)) throw DomainError("V_from_S: S[0] must be 1");
  const T half = T(1) / T(2);
  std::vector<T> V(S.size());
  V[0] = T(1);
  for (std::size_t n = 0; n + 1 < S.size(); ++n) {
    T nn = T(static_cast<long>(n));
    V[n + 1] = S[n + 1] + (nn - half - T(1) / (g - T(1))) * S[n] - (nn - half - T(1) / g) * V[n];
  }
  return V;
}

template <class T>
std::vector<T> T_from_S(const std::vector<T>& S, const T& g) {
  if (S.empty() || S[0] != T(1)) throw DomainError("T_from_S: S[0] must be 1");
  const T half = T(1) / T(2);
  std::vector<T> out(S.size());
  out[0] = T(1);
  for (std::size_t n = 0; n + 1 < S.size(); ++n) {
    T nn = T(static_cast<long>(n));
    out[n + 1] = S[n + 1] + (nn - half - T(1) / (g - T(1))) * S[n];
  }
  return out;
}

template <class T>
std::vector<T> U_from_TV(const std::vector<T>& Tn, const std::vector<T>& V, const T& g) {
  std::vector<T> U(Tn.size());
  if (U.empty()) return U;
  U[0] = T(1);
  const T k = (g + T(1)) / (g * (g - T(1)));
  for (std::size_t n = 1; n < Tn.size(); ++n) U[n] = Tn[n] - k * V[n - 1];
  return U;
}

struct Constants {
  double C0, C1, C2, lambda_cr;
  double C_small, Cprime_small;  // NaN at gamma = 2
};
double lambda_cr(double gamma);
double C_small(double gamma);  // throws UnsupportedError at gamma = 2
Constants constants(double gamma);

// Experimental least-squares fit of the first N small-x coefficients S_1..S_N
// of s_gamma on the grid b(x) in [b_lo, b_hi] (b(x) = ((gamma-1)/x)^{gamma-1}).
// Fitted values are estimates, not ground truth.
struct SnFit {
  std::vector<double> S;  // S[0] = 1
  double residual;        // rms misfit of the rescaled density
  double condition;       // of the scaled design matrix
};
SnFit estimate_Sn(double gamma, int N, double b_lo = 35, double b_hi = 350, int points = 48);

// Everything in one table. S defaults to (1, 0, 0, ...) at gamma = 2 and to
// (1) otherwise; pass fitted or known values to extend.
struct CoeffTables {
  double gamma;
  std::vector<double> S, T, V, U;
  std::vector<double> beta, gamma_n, delta_n;
  Constants k;
};
CoeffTables coeff_tables(double gamma, int N = 25, std::vector<double> S = {});

}  // namespace levytree
