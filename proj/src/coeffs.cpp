#include "levytree/coeffs.hpp"

#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace levytree {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();

int min_order(const Series& a, const Series& b) { return std::min(a.order(), b.order()); }
}  // namespace

Series::Series(std::vector<double> coeffs, int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
  if (order < 0) throw DomainError("Series: negative order");
  for (std::size_t k = 0; k < coeffs.size() && k < c_.size(); ++k) c_[k] = coeffs[k];
}

Series Series::constant(double a, int order) {
  Series s(order);
  s[0] = a;
  return s;
}

Series Series::identity(int order) {
  Series s(order);
  if (order >= 1) s[1] = 1;
  return s;
}

double Series::eval(double x) const {
  double r = 0;
  for (int k = order(); k >= 0; --k) r = r * x + c_[static_cast<std::size_t>(k)];
  return r;
}

Series Series::truncated(int order) const { return Series(c_, order); }

Series operator+(const Series& a, const Series& b) {
  Series r(min_order(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] + b[k];
  return r;
}

Series operator-(const Series& a, const Series& b) {
  Series r(min_order(a, b));
  for (int k = 0; k <= r.order(); ++k) r[k] = a[k] - b[k];
  return r;
}

Series operator*(const Series& a, const Series& b) {
  Series r(min_order(a, b));
  for (int i = 0; i <= r.order(); ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j <= r.order(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series operator*(double k, const Series& a) {
  Series r(a.order());
  for (int i = 0; i <= a.order(); ++i) r[i] = k * a[i];
  return r;
}

Series exp(const Series& a) {
  const int N = a.order();
  Series b(N);
  b[0] = std::exp(a[0]);
  for (int n = 1; n <= N; ++n) {
    double s = 0;
    for (int k = 1; k <= n; ++k) s += k * a[k] * b[n - k];
    b[n] = s / n;
  }
  return b;
}

Series log(const Series& a) {
  if (!(a[0] > 0)) throw DomainError("log: constant term must be positive");
  const int N = a.order();
  Series b(N);
  b[0] = std::log(a[0]);
  for (int n = 1; n <= N; ++n) {
    double s = 0;
    for (int k = 1; k < n; ++k) s += k * b[k] * a[n - k];
    b[n] = (a[n] - s / n) / a[0];
  }
  return b;
}

Series reciprocal(const Series& a) {
  if (a[0] == 0) throw DomainError("reciprocal: zero constant term");
  const int N = a.order();
  Series b(N);
  b[0] = 1 / a[0];
  for (int n = 1; n <= N; ++n) {
    double s = 0;
    for (int k = 1; k <= n; ++k) s += a[k] * b[n - k];
    b[n] = -s / a[0];
  }
  return b;
}

Series real_pow(const Series& a, double alpha) {
  if (a[0] == 0) throw DomainError("real_pow: zero constant term");
  if (a[0] < 0 && alpha != std::floor(alpha)) throw DomainError("real_pow: negative constant term");
  const int N = a.order();
  Series b(N);
  b[0] = std::pow(a[0], alpha);
  for (int n = 1; n <= N; ++n) {
    double s = 0;
    for (int k = 1; k <= n; ++k) s += ((alpha + 1) * k - n) * a[k] * b[n - k];
    b[n] = s / (n * a[0]);
  }
  return b;
}

Series compose(const Series& outer, const Series& inner) {
  if (inner[0] != 0) throw DomainError("compose: inner series must have zero constant term");
  const int N = min_order(outer, inner);
  Series r = Series::constant(outer[N], N);
  for (int k = N - 1; k >= 0; --k) {
    r = r * inner;
    r[0] += outer[k];
  }
  return r;
}

Series derivative(const Series& a) {
  Series r(std::max(0, a.order() - 1));
  for (int k = 1; k <= a.order(); ++k) r[k - 1] = k * a[k];
  return r;
}

Series integral(const Series& a) {
  Series r(a.order() + 1);
  for (int k = 0; k <= a.order(); ++k) r[k + 1] = a[k] / (k + 1);
  return r;
}

std::vector<double> lagrange_invert(const Series& H, int N) {
  if (H[0] == 0) throw DomainError("lagrange_invert: H must have nonzero constant term");
  if (N > H.order() + 1) throw DomainError("lagrange_invert: N exceeds series order");
  std::vector<double> beta(static_cast<std::size_t>(N) + 1, 0.0);
  const Series h = H.truncated(std::max(0, N - 1));
  for (int n = 1; n <= N; ++n) beta[n] = real_pow(h, n)[n - 1] / n;
  return beta;
}

std::vector<double> invert_by_iteration(const Series& H, int N) {
  if (H[0] == 0) throw DomainError("invert_by_iteration: H must have nonzero constant term");
  Series h = H.truncated(N);
  Series f(N);
  for (int it = 0; it < N; ++it) {
    Series hf = compose(h, f);
    Series next(N);
    for (int k = 1; k <= N; ++k) next[k] = hf[k - 1];
    f = next;
  }
  std::vector<double> beta(static_cast<std::size_t>(N) + 1, 0.0);
  for (int k = 1; k <= N; ++k) beta[k] = f[k];
  return beta;
}

double C0(double gamma) {
  check_gamma(gamma);
  using boost::math::quadrature::gauss_kronrod;
  const double g = gamma;
  // first term with s = (1 + u)^{1 - g}: a bounded integrand on (0, 2^{1-g})
  const double p = g / (g - 1);
  auto g1 = [p](double s) { return -1 / std::expm1(p * std::log(s)); };
  double I1 = gauss_kronrod<double, 31>::integrate(g1, 0.0, std::pow(2.0, 1 - g), 15, 1e-15) / (g - 1);
  auto pm1 = [g](double u) { return std::expm1(g * std::log1p(u)); };  // (1+u)^g - 1
  auto g2 = [&](double u) {
    if (u < 1e-6) return (g - 1) / 2 - (g - 1) * (g + 1) / 12 * u;  // small-u expansion
    double q = pm1(u);
    return (q - g * u) / (u * q);
  };
  double I2 = gauss_kronrod<double, 31>::integrate(g2, 0.0, 1.0, 15, 1e-15);
  return g * I1 - I2;
}

Series S_series(double gamma, int N) {
  Series s(N);
  double b = 1;  // binom(gamma, k)
  for (int k = 1; k <= N + 1; ++k) {
    b *= (gamma - k + 1) / k;
    if (k >= 2) s[k - 1] = b / gamma;
  }
  return s;
}

Series G_series(double gamma, int N) {
  Series S = S_series(gamma, N + 1);
  Series Su(N);  // S(u)/u
  for (int k = 0; k <= N; ++k) Su[k] = S[k + 1];
  Series one_plus = S.truncated(N);
  one_plus[0] += 1;
  Series g = Su * reciprocal(one_plus);
  return integral(g).truncated(N);
}

Series exp_G(double gamma, int N) { return exp(G_series(gamma, N)); }

namespace {
Series H_series(double gamma, double c0, int N) { return std::exp(c0) * exp_G(gamma, N); }
}  // namespace

std::vector<double> beta_coeffs(double gamma, int N) {
  check_gamma(gamma);
  if (N < 1) throw DomainError("beta_coeffs: N must be at least 1");
  // f = sum beta_n x^n solves f = x H(f), equivalently gamma x f' = (1 + f)^gamma - 1
  // with beta_1 = e^{C0}. The term-by-term ODE solve is much better conditioned
  // than extracting [z^{n-1}] H^n; lagrange_invert remains the cross-check.
  const double g = gamma;
  std::vector<double> a(static_cast<std::size_t>(N) + 1, 0.0), b(a.size(), 0.0);  // a = 1 + f, b = a^g
  a[0] = b[0] = 1;
  a[1] = std::exp(C0(g));
  b[1] = g * a[1];
  for (int n = 2; n <= N; ++n) {
    double R = 0;
    for (int k = 1; k < n; ++k) R += ((g + 1) * k - n) * a[k] * b[n - k];
    R /= n;
    a[n] = R / (g * (n - 1));
    b[n] = g * a[n] + R;
  }
  a[0] = 0;
  return a;
}

GammaDelta gammadelta_coeffs(double gamma, int N) {
  check_gamma(gamma);
  if (N < 2) throw DomainError("gammadelta_coeffs: N must be at least 2");
  // With P = (1 + f)^g = 1 + g x f', L1(y, 0) = f - x f'(1 + f) + ((g-1)/g) y (P - 1)^2,
  // so both sequences are convolutions of beta and stay accurate for large n.
  const double g = gamma;
  std::vector<double> beta = beta_coeffs(g, N);
  Series onef(N);
  onef[0] = 1;
  for (int n = 1; n <= N; ++n) onef[n] = beta[n];
  Series P = real_pow(onef, g);
  P[0] -= 1;
  Series P2 = P * P;
  Series P1 = real_pow(onef, g + 1);
  GammaDelta out;
  out.gamma_n.assign(static_cast<std::size_t>(N) + 1, 0.0);
  out.delta_n.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int n = 2; n <= N; ++n) {
    out.gamma_n[n] = (g - 1) / g * P2[n] / n;
    out.delta_n[n] = -(P1[n] - (g + 1) * beta[n]) / g;
  }
  return out;
}

GammaDelta gammadelta_coeffs_composition(double gamma, int N) {
  check_gamma(gamma);
  if (N < 2) throw DomainError("gammadelta_coeffs_composition: N must be at least 2");
  const double g = gamma, c0 = C0(gamma);
  const int M = N - 2;
  std::vector<double> beta = beta_coeffs(g, N);
  Series f(M);
  for (int k = 1; k <= M; ++k) f[k] = beta[k];
  Series Hf = compose(H_series(g, c0, M), f);
  Series S = S_series(g, M);
  Series onePlusS = S;
  onePlusS[0] += 1;
  Series K = onePlusS * onePlusS;
  Series Mser(M);
  double b = 1;  // binom(g + 1, k)
  for (int k = 1; k <= M + 2; ++k) {
    b *= (g + 1 - k + 1) / k;
    if (k >= 2) Mser[k - 2] = b / (0.5 * g * (g + 1));
  }
  Series H2 = Hf * Hf;
  Series gp = (g * (g - 1)) * (H2 * compose(K, f));
  Series dp = (-0.5 * (g + 1)) * (H2 * compose(Mser, f));
  GammaDelta out;
  out.gamma_n.assign(static_cast<std::size_t>(N) + 1, 0.0);
  out.delta_n.assign(static_cast<std::size_t>(N) + 1, 0.0);
  for (int n = 2; n <= N; ++n) {
    out.gamma_n[n] = gp[n - 2] / n;
    out.delta_n[n] = dp[n - 2];
  }
  return out;
}

double lambda_cr(double gamma) {
  check_gamma(gamma);
  double a = kPi / gamma;
  return std::pow(a / std::sin(a), gamma / (gamma - 1));
}

double C_small(double gamma) {
  check_gamma(gamma);
  if (gamma >= 2) throw UnsupportedError("C and C' are not defined at gamma = 2");
  const double g = gamma;
  return std::pow(g - 1, g + 2) * boost::math::tgamma(1 - 1 / g) /
         (std::pow(g, g - 1) * lambda_cr(g) * boost::math::tgamma(2 - g));
}

Constants constants(double gamma) {
  check_gamma(gamma);
  const double g = gamma;
  Constants k;
  k.C0 = C0(g);
  const double Ge = boost::math::tgamma((g - 1) / g);
  k.C1 = std::pow(2 * kPi, -0.5) * std::pow(g - 1, 0.5 + 1 / g) * std::pow(g, 1.5) * Ge * std::exp(k.C0);
  k.C2 = std::pow(8 * kPi, -0.5) * std::pow(g - 1, 1.5 + 1 / g) * std::pow(g, 2.5) * Ge * std::exp(2 * k.C0);
  k.lambda_cr = lambda_cr(g);
  if (g < 2) {
    k.C_small = C_small(g);
    k.Cprime_small = 2 * k.lambda_cr * k.C_small;
  } else {
    k.C_small = k.Cprime_small = std::numeric_limits<double>::quiet_NaN();
  }
  return k;
}

CoeffTables coeff_tables(double gamma, int N, std::vector<double> S) {
  check_gamma(gamma);
  CoeffTables t;
  t.gamma = gamma;
  if (S.empty()) {
    S.assign(gamma == 2.0 ? static_cast<std::size_t>(N) : 1, 0.0);
    S[0] = 1;
  }
  t.S = S;
  t.V = V_from_S(S, gamma);
  t.T = T_from_S(S, gamma);
  t.U = U_from_TV(t.T, t.V, gamma);
  t.beta = beta_coeffs(gamma, N);
  auto gd = gammadelta_coeffs(gamma, N);
  t.gamma_n = gd.gamma_n;
  t.delta_n = gd.delta_n;
  t.k = constants(gamma);
  return t;
}

}  // namespace levytree
