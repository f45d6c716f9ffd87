#include "levytree/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "levytree/coeffs.hpp"

namespace levytree {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// beta_n, gamma_n, delta_n up to the last index where all are finite.
struct TailCoeffs {
  std::vector<double> beta, gn, dn;
  int usable = 0;
};

const TailCoeffs& tail_coeffs(double gamma, int N) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, std::unique_ptr<TailCoeffs>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{gamma, N}];
  if (!slot) {
    auto c = std::make_unique<TailCoeffs>();
    c->beta = beta_coeffs(gamma, N);
    auto gd = gammadelta_coeffs(gamma, N);
    c->gn = gd.gamma_n;
    c->dn = gd.delta_n;
    int n = 1;
    while (n <= N && std::isfinite(c->beta[n]) && std::isfinite(c->gn[n]) && std::isfinite(c->dn[n]) &&
           std::abs(c->beta[n]) < 1e290 && std::abs(c->gn[n]) < 1e290 && std::abs(c->dn[n]) < 1e290)
      ++n;
    c->usable = n - 1;
    slot = std::move(c);
  }
  return *slot;
}

template <class F>
std::vector<double> parallel_map(const std::vector<double>& xs, F f, int threads) {
  std::vector<double> out(xs.size());
  if (threads <= 0) threads = default_threads();
  threads = std::max(1, std::min<int>(threads, static_cast<int>(xs.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
  }
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = static_cast<std::size_t>(t); i < xs.size(); i += static_cast<std::size_t>(threads))
          out[i] = f(xs[i]);
      } catch (...) {
        errs[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

double check_r(double r, const char* what) {
  if (!(r > 0) || !std::isfinite(r)) throw DomainError(std::string(what) + ": r must be positive");
  return r;
}

// scale where the normalized laws live
double bulk_scale(double g) { return std::pow(g - 1, -(g - 1) / g); }

std::string refusal_message(const char* what, double r, double gamma, double asym) {
  std::ostringstream os;
  os << what << ": r = " << r << " is below the radius where the series keeps its accuracy for gamma = "
     << gamma << "; the small-r asymptote gives N_nr(<= r) ~ " << asym;
  return os.str();
}

// sum_n c_n xi(n r) with error estimate; kind height uses beta, diam uses gamma_n, delta_n.
TailValue tail_series(double r, double g, TailKind kind, const TailConfig& cfg) {
  const StableIndex s(g);
  const TailCoeffs& C = tail_coeffs(g, cfg.max_terms);
  const double tol = cfg.term_tol * s.c_gamma;
  const double bulk = 1.5 * bulk_scale(g);
  double sum = 0, abs_sum = 0, last = 0;
  int quiet = 0, n = kind == TailKind::height ? 1 : 2;
  bool done = false;
  for (; n <= C.usable; ++n) {
    const double x = n * r;
    double t, a;
    if (kind == TailKind::height) {
      t = C.beta[n] * xi(x, g, cfg.quad);
      a = std::abs(t);
    } else {
      double p = C.gn[n] * xi_bar(x, g, cfg.quad), q = C.dn[n] * xi(x, g, cfg.quad);
      t = p + q;
      a = std::abs(p) + std::abs(q);
    }
    sum += t;
    abs_sum += a;
    last = a;
    quiet = (a < tol && x > bulk) ? quiet + 1 : 0;
    if (quiet >= 2) {
      done = true;
      break;
    }
  }
  TailValue out;
  out.terms = n;
  out.method = "series";
  out.value = sum / s.c_gamma;
  out.error = (cfg.term_rel_err * abs_sum + 2 * last) / s.c_gamma;
  if (!done) out.error = std::numeric_limits<double>::infinity();
  return out;
}

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

}  // namespace

// ---------------------------------------------------------------- laws under N

double diam_tail_N(double r, double gamma) {
  const StableIndex s(gamma);
  check_r(r, "diam_tail_N");
  // Psi(v)^2 int_v^inf dl/Psi(l)^2 = v/(2g - 1)
  const double g = gamma;
  return v(r, s) * (1 - 1 / (2 * g - 1));
}

double diam_density(double x, double gamma) {
  const StableIndex s(gamma);
  check_r(x, "diam_density");
  // Psi(v) - Psi(v)^2 Psi'(v) v^{1-2g}/(2g - 1) = v^g (1 - g/(2g - 1))
  const double g = gamma;
  return std::pow(v(x / 2, s), g) * (1 - g / (2 * g - 1));
}

double cond_diam_given_height(double y, double r, double gamma) {
  check_gamma(gamma);
  check_r(r, "cond_diam_given_height");
  if (std::isnan(y)) throw DomainError("cond_diam_given_height: y is NaN");
  if (y <= r) return 0;
  if (y >= 2 * r) return 1;
  // Psi(v(y/2))^2 / (Psi(v(r)) Psi(v(y - r))) with Psi(v(t)) proportional to t^{-g/(g-1)}
  return std::pow(4 * r * (y - r) / (y * y), gamma / (gamma - 1));
}

// ---------------------------------------------------------------- joint law

namespace {
// w/(w^g - 1) - (g - 1) F(w), with F(w) = m
double ratio_minus_linear(double m, double phim, double g) {
  const double w = 1 + phim;
  const double lw = std::log1p(phim), zeta = std::exp(-g * lw);
  if (zeta > 0.5) return w / std::expm1(g * lw) - (g - 1) * m;
  // both terms share the leading w^{1-g}; the difference is w^{1-g} sum_k k/(k + delta) zeta^k
  const double d = 1 - 1 / g;
  double sum = 0, zk = 1;
  for (int k = 1; k < 200; ++k) {
    zk *= zeta;
    double t = k / (k + d) * zk;
    sum += t;
    if (t < 1e-18 * sum) break;
  }
  return std::exp((1 - g) * lw) * sum;
}
}  // namespace

double L1(double y, double z, double gamma, const SolverConfig& cfg) {
  const StableIndex s(gamma);
  if (!(y >= 0 && z >= 0) || (y == 0 && z == 0)) throw DomainError("L1: need y, z >= 0, not both 0");
  const double g = gamma;
  const double top = phi(std::max(y, z), s, cfg);
  if (!(z < 2 * y)) return top;
  const double m = std::min(y, 2 * y - z);
  const double A = std::expm1(g * std::log1p(phi(y, s, cfg)));  // w(y)^g - 1
  return top - A * A * ratio_minus_linear(m, phi(m, s, cfg), g) / g;
}

double L_lambda(double y, double z, double lambda, double gamma, const SolverConfig& cfg) {
  check_gamma(gamma);
  if (!(lambda > 0)) throw DomainError("L_lambda: lambda must be positive");
  const double a = std::pow(lambda, (gamma - 1) / gamma);
  return std::pow(lambda, 1 / gamma) * L1(a * y, a * z, gamma, cfg);
}

double L1_diag_series(double y, double gamma, int N) {
  check_gamma(gamma);
  if (!(y > 0)) throw DomainError("L1_diag_series: y must be positive");
  if (N < 2) throw DomainError("L1_diag_series: N must be at least 2");
  auto gd = gammadelta_coeffs(gamma, N);
  double sum = 0;
  for (int n = N; n >= 2; --n) sum += (n * gd.gamma_n[n] * y + gd.delta_n[n]) * std::exp(-gamma * n * y);
  return sum;
}

// ---------------------------------------------------------------- Brownian forms

double brownian_height_tail(double r) {
  check_r(r, "brownian_height_tail");
  double sum = 0;
  for (int n = 1;; ++n) {
    double a = double(n) * n * r * r;
    sum += (2 * a - 1) * std::exp(-a);
    if (a > 50 && a > 2 * std::log(2 * a + 1) + 45) break;
  }
  return 2 * sum;
}

double brownian_height_cdf(double r) {
  check_r(r, "brownian_height_cdf");
  double sum = 0;
  for (int n = 1;; ++n) {
    double a = double(n) * n * kPi * kPi / (r * r);
    sum += double(n) * n * std::exp(-a);
    if (a > 50 && a > 2 * std::log(double(n)) + 45) break;
  }
  return brownian_height_cdf_prefactor() / (r * r * r) * sum;
}

double brownian_diam_tail(double r) {
  check_r(r, "brownian_diam_tail");
  double sum = 0;
  for (int n = 2;; ++n) {
    double a = double(n) * n * r * r;
    sum += (double(n) * n - 1) * (a * a / 6 - 2 * a + 2) * std::exp(-a / 4);
    if (a > 200 && a / 4 > 3 * std::log(a + 1) + 45) break;
  }
  return sum;
}

double brownian_diam_cdf(double r) {
  check_r(r, "brownian_diam_cdf");
  double sum = 0;
  for (int n = 1;; ++n) {
    double a = 4 * (kPi * n / r) * (kPi * n / r);
    sum += ((8 / (r * r * r)) * (24 * a - 36 * a * a + 8 * a * a * a) + (16 / r) * a * a) * std::exp(-a);
    if (a > 50 && a > 3 * std::log(a) + 50) break;
  }
  return std::sqrt(kPi) / 3 * sum;
}

double brownian_height_cdf_prefactor() { return 4 * std::pow(kPi, 2.5); }
double brownian_diam_cdf_prefactor() { return std::pow(2.0, 12) * std::pow(kPi, 6.5) / 3; }

double height_cdf_asymptote(double r, double gamma) {
  check_gamma(gamma);
  check_r(r, "height_cdf_asymptote");
  const double g = gamma;
  if (g == 2) return brownian_height_cdf_prefactor() * std::exp(-3 * std::log(r) - kPi * kPi / (r * r));
  const double lc = lambda_cr(g);
  return C_small(g) * std::exp((g + 2 + 1 / (g - 1)) * std::log(r) - lc * std::pow(r, -g / (g - 1)));
}

double diam_cdf_asymptote(double r, double gamma) {
  check_gamma(gamma);
  check_r(r, "diam_cdf_asymptote");
  const double g = gamma;
  if (g == 2) return brownian_diam_cdf_prefactor() * std::exp(-9 * std::log(r) - 4 * kPi * kPi / (r * r));
  const double rho = r / 2, lc = lambda_cr(g);
  return 2 * lc * C_small(g) * std::exp((g + 1) * std::log(rho) - lc * std::pow(rho, -g / (g - 1)));
}

// ---------------------------------------------------------------- normalized tails

TailValue nr_height_tail_eval(double r, double gamma, const TailConfig& cfg) {
  check_gamma(gamma);
  check_r(r, "nr_height_tail");
  if (gamma == 2 && r < cfg.brownian_switch) {
    TailValue t;
    t.value = 1 - brownian_height_cdf(r);
    t.error = 1e-15;
    t.method = "brownian_cdf";
    return t;
  }
  TailValue t = tail_series(r, gamma, TailKind::height, cfg);
  if (!(t.error <= cfg.accuracy))
    throw UnsupportedError(refusal_message("nr_height_tail", r, gamma, height_cdf_asymptote(r, gamma)));
  t.value = clamp01(t.value);
  return t;
}

double nr_height_tail(double r, double gamma, const TailConfig& cfg) {
  return nr_height_tail_eval(r, gamma, cfg).value;
}

TailValue nr_diam_tail_eval(double r, double gamma, const TailConfig& cfg) {
  check_gamma(gamma);
  check_r(r, "nr_diam_tail");
  if (gamma == 2 && r / 2 < cfg.brownian_switch) {
    TailValue t;
    t.value = 1 - brownian_diam_cdf(r);
    t.error = 1e-15;
    t.method = "brownian_cdf";
    return t;
  }
  TailValue t = tail_series(r / 2, gamma, TailKind::diam, cfg);
  if (!(t.error <= cfg.accuracy))
    throw UnsupportedError(refusal_message("nr_diam_tail", r, gamma, diam_cdf_asymptote(r, gamma)));
  t.value = clamp01(t.value);
  return t;
}

double nr_diam_tail(double r, double gamma, const TailConfig& cfg) {
  return nr_diam_tail_eval(r, gamma, cfg).value;
}

double nr_series_min_radius(double gamma, TailKind kind, const TailConfig& cfg) {
  check_gamma(gamma);
  static std::mutex mu;
  static std::map<std::tuple<double, int, double, int>, double> cache;
  const auto key = std::make_tuple(gamma, static_cast<int>(kind), cfg.accuracy, cfg.max_terms);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  // radius in the argument of the series (r for height, r/2 for diam)
  auto ok = [&](double r) {
    try {
      return tail_series(r, gamma, kind, cfg).error <= cfg.accuracy;
    } catch (const QuadratureError&) {
      return false;
    }
  };
  double hi = bulk_scale(gamma);
  while (!ok(hi)) {
    hi *= 1.5;
    if (hi > 1e3) throw SolverError("nr_series_min_radius: no accurate radius found", 0, hi);
  }
  double lo = hi / 1.5;
  while (ok(lo)) {
    hi = lo;
    lo /= 1.5;
    if (lo < 1e-3) break;
  }
  while (hi / lo > 1.01) {
    double mid = std::sqrt(lo * hi);
    (ok(mid) ? hi : lo) = mid;
  }
  double r = kind == TailKind::height ? hi : 2 * hi;
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = r;
  return r;
}

double height_tail_normalized(double r, double gamma, const TailConfig& cfg) {
  check_gamma(gamma);
  check_r(r, "height_tail_normalized");
  const double g = gamma;
  double N = nr_height_tail(r * bulk_scale(g), g, cfg);
  return std::exp((-1 - g / 2) * std::log(r) + std::pow(r, g)) * N / constants(g).C1;
}

double diam_tail_normalized(double r, double gamma, const TailConfig& cfg) {
  check_gamma(gamma);
  check_r(r, "diam_tail_normalized");
  const double g = gamma;
  double N = nr_diam_tail(r * bulk_scale(g), g, cfg);
  return std::exp((-1 - 1.5 * g) * std::log(r) + std::pow(r, g)) * N / constants(g).C2;
}

// ---------------------------------------------------------------- moments

namespace {

double gamma_prefactor(double g) {  // sqrt(pi) 2^{-2 delta} / Gamma(1/2 + delta)
  const double d = 1 - 1 / g;
  return std::sqrt(kPi) * std::pow(2.0, -2 * d) / boost::math::tgamma(0.5 + d);
}

double height_integral(double g) {
  // v = t^p with p = g/(g-1) removes the v^{-1/g} singularity
  const double p = g / (g - 1), q = 1 / (g - 1);
  auto f = [&](double t) {
    if (t <= 0) return p;
    const double L = std::log(t);
    if (L == 0) return 1 / g;  // removable limit at t = 1
    const double e = std::expm1(p * L);
    return p * std::expm1(q * L) * std::expm1(L) / (e * e);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0;
  double I = ts.integrate(f, 0.0, 1.0, 1e-14, &err);
  if (err > 1e-11) throw QuadratureError("moment_height: quadrature did not converge", I, err);
  return I;
}

// partial-fraction evaluation of sum_{n >= 1} (2n + 1 + 2d)/((n + d)(n + 1 + d)(n + 2d))
double height_sum(double d) {
  using boost::math::digamma;
  const double A = 1 / d, B = -1 / (1 - d), C = -(1 - 2 * d) / (d * (1 - d));
  return -(A * digamma(1 + d) + B * digamma(2 + d) + C * digamma(1 + 2 * d));
}

// W(x) at x = 1 + u, direct formula
double W_direct(double u, double g) {
  const StableIndex s(g);
  const double x = 1 + u;
  const double Fx = u < 1 ? F_shifted(u, s) : F(x, s);
  const double xg1 = std::expm1(g * std::log1p(u));  // x^g - 1
  return 2 * (g - 1) * (g - 1) * std::pow(x, g - 1) * xg1 * Fx * Fx - (g - 1) * (2 * g + 1) / g * xg1 * Fx -
         u / xg1 + x / g;
}

// W(x) = x B(z) + z/(1 - z), z = x^{-g}; B has no constant or linear term
constexpr int kTailTerms = 120;
std::vector<double> W_tail_coeffs(double g) {
  const double d = 1 - 1 / g;
  const int K = kTailTerms;
  std::vector<double> P(K + 1, 0.0), P2(K + 1, 0.0), b(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) P[k] = 1 / (k + d);
  for (int k = 2; k <= K; ++k)
    for (int i = 1; i < k; ++i) P2[k] += P[i] * P[k - i];
  const double c1 = d * (2 * g - 1) / g, c2 = 2 * d * d;
  for (int k = 2; k <= K; ++k) b[k] = c1 * (P[k] - P[k - 1]) + c2 * (P2[k] - P2[k - 1]) - 1;
  // b[1] = 1/g + c1/(1 + d) - 1 vanishes identically
  return b;
}

double W_series(double x, double g) {
  static thread_local double cached_g = 0;
  static thread_local std::vector<double> b;
  if (g != cached_g) {
    b = W_tail_coeffs(g);
    cached_g = g;
  }
  const double z = std::pow(x, -g);
  double B = 0;
  for (int k = kTailTerms; k >= 2; --k) B = B * z + b[k];
  return x * B * z * z + z / (1 - z);
}

double W_switch(double g) { return std::pow(2.0, 1 / g); }

double diam_quadrature_part(double g) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0, L1n = 0;
  double I = ts.integrate([g](double u) { return u <= 0 ? 0.0 : W_direct(u, g); }, 0.0, W_switch(g) - 1, 1e-13,
                          &err, &L1n);
  if (err > 1e-10 * std::max(1.0, L1n)) throw QuadratureError("moment_diam: quadrature did not converge", I, err);
  return I;
}

// int_1^X W dx as int_{F(X)}^inf W(w(y)) (w(y)^g - 1) dy, closed with the beta series
double diam_y_part(double g) {
  const StableIndex s(g);
  const double yX = F(W_switch(g), s);
  int N = 80;
  std::vector<double> beta = beta_coeffs(g, N);
  while (!(std::isfinite(beta[N]) && std::abs(beta[N]) < 1e200)) N /= 2;
  if (N < 8) throw UnsupportedError("moment_diam: beta series overflows");
  // q_Y with N^2 |beta_N| q^N = 1e-18
  const double lq = (std::log(1e-18) - 2 * std::log(double(N)) - std::log(std::abs(beta[N]))) / N;
  const double Y = std::max(yX + 0.5, -lq / g);
  auto integrand = [&](double y) {
    const double ph = phi(y, s), w = 1 + ph, A = std::expm1(g * std::log1p(ph));
    return 2 * (g - 1) * (g - 1) * std::pow(w, g - 1) * A * A * y * y - (g - 1) * (2 * g + 1) / g * A * A * y -
           ph + w * A / g;
  };
  double err = 0;
  double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, yX, Y, 12, 1e-13, &err);
  if (err > 1e-10) throw QuadratureError("moment_diam: y-quadrature did not converge", I, err);
  // series in q = e^{-g y}: f, A = g q f', c2 y^2 + c1 y + c0
  Series f(N), A(N);
  for (int n = 1; n <= N; ++n) {
    f[n] = beta[n];
    A[n] = g * n * beta[n];
  }
  Series onef = f;
  onef[0] = 1;
  Series A2 = A * A;
  Series c2 = (2 * (g - 1) * (g - 1)) * (real_pow(onef, g - 1) * A2);
  Series c1 = (-(g - 1) * (2 * g + 1) / g) * A2;
  Series c0 = (1 / g) * (onef * A) - f;
  double tail = 0;
  for (int n = N; n >= 1; --n) {
    const double a = g * n, e = std::exp(-a * Y);
    tail += e * (c2[n] * (Y * Y / a + 2 * Y / (a * a) + 2 / (a * a * a)) + c1[n] * (Y / a + 1 / (a * a)) + c0[n] / a);
  }
  return I + tail;
}

}  // namespace

double moment_diam_integrand(double x, double gamma) {
  check_gamma(gamma);
  if (!(x > 1)) throw DomainError("moment_diam_integrand: x must exceed 1");
  return x >= W_switch(gamma) ? W_series(x, gamma) : W_direct(x - 1, gamma);
}

double moment_diam_tail(double X, double gamma) {
  check_gamma(gamma);
  if (!(X >= W_switch(gamma))) throw DomainError("moment_diam_tail: X below the series range");
  const double g = gamma;
  std::vector<double> b = W_tail_coeffs(g);
  double sum = 0;
  for (int k = kTailTerms; k >= 1; --k) {
    if (k >= 2) sum += b[k] * std::pow(X, 2 - g * k) / (g * k - 2);
    sum += std::pow(X, 1 - g * k) / (g * k - 1);
  }
  return sum;
}

double moment_height(double gamma, MomentMethod method) {
  check_gamma(gamma);
  const double g = gamma, d = 1 - 1 / g, pre = gamma_prefactor(g);
  if (method == MomentMethod::quadrature) return 2 * pre * height_integral(g);
  return pre * (1 / d - 2 * d / (1 + d) + 2 * d * (1 - d) * height_sum(d));
}

double moment_diam(double gamma, MomentMethod method) {
  check_gamma(gamma);
  const double g = gamma, pre = 4 * gamma_prefactor(g);  // 2^{2/g} sqrt(pi)/Gamma(3/2 - 1/g)
  const double tail = moment_diam_tail(W_switch(g), g);
  const double body = method == MomentMethod::quadrature ? diam_quadrature_part(g) : diam_y_part(g);
  return pre * (body + tail);
}

MomentReport moments(double gamma) {
  MomentReport m;
  m.gamma = gamma;
  m.mean_height = moment_height(gamma, MomentMethod::quadrature);
  m.mean_diam = moment_diam(gamma, MomentMethod::quadrature);
  m.mean_height_series = moment_height(gamma, MomentMethod::series);
  m.mean_diam_series = moment_diam(gamma, MomentMethod::series);
  m.ratio = m.mean_diam / m.mean_height;
  return m;
}

// ---------------------------------------------------------------- Laplace cross-check

LaplaceReport laplace_crosscheck(double gamma, const std::vector<double>& lambdas, const TailConfig& cfg) {
  check_gamma(gamma);
  if (lambdas.empty()) throw DomainError("laplace_crosscheck: empty lambda grid");
  for (double l : lambdas)
    if (!(l >= 0.5 && l <= 10)) throw DomainError("laplace_crosscheck: lambda must lie in [0.5, 10]");
  const double g = gamma, d = 1 - 1 / g;
  const StableIndex s(g);
  LaplaceReport rep;
  rep.gamma = g;
  rep.r_min_height = g == 2 ? 0 : nr_series_min_radius(g, TailKind::height, cfg);
  rep.r_min_diam = g == 2 ? 0 : nr_series_min_radius(g, TailKind::diam, cfg);

  // In r = x^{-d}: L(f) = (c/d) int e^{-lambda r^{-1/d}} r^{1/(g-1)} N(r) dlog r.
  const double lmin = *std::min_element(lambdas.begin(), lambdas.end());
  const double r_lo = std::pow(lmin / 740, d);
  const double r_hi = std::pow(90 / std::pow(g - 1, g - 1), 1 / g);
  const double u_lo = std::log(r_lo), u_hi = std::log(r_hi);
  const int panels = static_cast<int>(std::ceil((u_hi - u_lo) / 0.25));
  using GL = boost::math::quadrature::gauss<double, 20>;
  std::vector<double> nodes, weights;
  const double h = (u_hi - u_lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = u_lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
      const double a = GL::abscissa()[i], wt = GL::weights()[i];
      nodes.push_back(mid + 0.5 * h * a);
      weights.push_back(0.5 * h * wt);
      if (a != 0) {
        nodes.push_back(mid - 0.5 * h * a);
        weights.push_back(0.5 * h * wt);
      }
    }
  }
  std::vector<double> rs(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) rs[i] = std::exp(nodes[i]);
  double neglected = 0;
  std::mutex mu;
  auto note = [&](double m) {
    std::lock_guard<std::mutex> lock(mu);
    neglected = std::max(neglected, m);
  };
  auto NH = parallel_map(
      rs,
      [&](double r) {
        if (r < rep.r_min_height) {
          double a = height_cdf_asymptote(r, g);
          note(a);
          return 1 - a;
        }
        return nr_height_tail(r, g, cfg);
      },
      0);
  auto ND = parallel_map(
      rs,
      [&](double r) {
        if (2 * r < rep.r_min_diam) {
          double a = diam_cdf_asymptote(2 * r, g);
          note(a);
          return 1 - a;
        }
        return nr_diam_tail(2 * r, g, cfg);
      },
      0);
  rep.neglected_mass = neglected;
  rep.truncation_warning = neglected > 1e-8;
  for (double lam : lambdas) {
    double lh = 0, ld = 0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const double r = rs[i];
      const double k = weights[i] * std::exp(-lam * std::pow(r, -1 / d) + std::log(r) / (g - 1));
      lh += k * NH[i];
      ld += k * ND[i];
    }
    LaplacePoint pt;
    pt.lambda = lam;
    pt.height_lhs = s.c_gamma / d * lh;
    pt.diam_lhs = s.c_gamma / d * ld;
    const double a = std::pow(lam, d), pre = std::pow(lam, 1 / g);
    pt.height_rhs = pre * phi(a, s);
    pt.diam_rhs = pre * L1(a, 0, g);
    pt.height_rel_err = std::abs(pt.height_lhs / pt.height_rhs - 1);
    pt.diam_rel_err = std::abs(pt.diam_lhs / pt.diam_rhs - 1);
    rep.max_rel_err_height = std::max(rep.max_rel_err_height, pt.height_rel_err);
    rep.max_rel_err_diam = std::max(rep.max_rel_err_diam, pt.diam_rel_err);
    rep.points.push_back(pt);
  }
  return rep;
}

// ---------------------------------------------------------------- Table 1

Table1Report table1_report(double gamma, const std::vector<double>& grid) {
  check_gamma(gamma);
  const double g = gamma;
  Table1Report t;
  t.gamma = g;
  t.lambda_cr = lambda_cr(g);
  t.C_small = g < 2 ? C_small(g) : kNaN;
  t.Cprime_small = g < 2 ? 2 * t.lambda_cr * t.C_small : kNaN;
  t.brownian_height_prefactor = brownian_height_cdf_prefactor();
  t.brownian_diam_prefactor = brownian_diam_cdf_prefactor();
  const double k = g * std::sin(kPi / g) / kPi, e = -g / (g - 1);
  for (double r : grid) {
    check_r(r, "table1_report");
    Table1Row row;
    row.r = r;
    if (g == 2) {
      row.height_large = row.diam_large = r * r;
      row.height_small = kPi * kPi / (r * r);
      row.diam_small = 4 * kPi * kPi / (r * r);
    } else {
      row.height_large = row.diam_large = std::pow(g - 1, g - 1) * std::pow(r, g);
      row.height_small = std::pow(k * r, e);
      row.diam_small = std::pow(k * r / 2, e);
    }
    t.rows.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------- curves

TailCurve tail_curve(const std::string& kind, double gamma, const std::vector<double>& grid, double z, int threads,
                     const TailConfig& cfg) {
  check_gamma(gamma);
  if (grid.size() < 2) throw DomainError("tail_curve: grid needs at least two points");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("tail_curve: grid must be increasing");
  TailCurve c;
  c.grid = grid;
  c.kind = kind;
  if (kind == "height_tail")
    c.values = parallel_map(grid, [&](double r) { return nr_height_tail(r, gamma, cfg); }, threads);
  else if (kind == "diam_tail")
    c.values = parallel_map(grid, [&](double r) { return nr_diam_tail(r, gamma, cfg); }, threads);
  else if (kind == "diam_density")
    c.values = parallel_map(grid, [&](double r) { return diam_density(r, gamma); }, threads);
  else if (kind == "joint")
    c.values = parallel_map(grid, [&](double r) { return L1(r, z, gamma); }, threads);
  else
    throw DomainError("tail_curve: unknown kind '" + kind + "'");
  return c;
}

}  // namespace levytree
