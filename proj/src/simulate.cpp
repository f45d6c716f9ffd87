#include "levytree/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/sin_pi.hpp>

#include "levytree/laws.hpp"

namespace levytree {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// log P(X > k) for the stable law, k >= 1
double log_stable_tail(double g, double k) {
  return std::lgamma(g) + std::log(std::abs(boost::math::sin_pi(g))) - std::log(kPi) +
         std::lgamma(k + 1 - g) - std::lgamma(k + 1) - std::log(g);
}

// P(X > k), k = 0..kTable, for one gamma; shared between threads
const std::vector<double>& stable_tail_table(double g) {
  static std::mutex mu;
  static std::map<double, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(g);
  if (it != cache.end()) return it->second;
  std::vector<double> t(static_cast<std::size_t>(OffspringLaw::kTable) + 1);
  t[0] = t[1] = (g - 1) / g;
  for (std::size_t k = 2; k < t.size(); ++k) t[k] = t[k - 1] * (k - g) / k;
  return cache.emplace(g, std::move(t)).first->second;
}

// p_0 .. p_{n-1}
std::vector<double> pmf_head(const OffspringLaw& law, int n) {
  std::vector<double> p(static_cast<std::size_t>(n), 0.0);
  if (law.kind == OffspringKind::geometric_half) {
    for (int k = 0; k < n; ++k) p[k] = std::ldexp(1.0, -k - 1);
    return p;
  }
  const double g = law.gamma;
  p[0] = 1 / g;
  if (n > 2) p[2] = (g - 1) / 2;
  for (int k = 3; k < n; ++k) p[k] = p[k - 1] * (k - 1 - g) / k;
  return p;
}

template <class F>
void parallel_for(int count, int threads, F f) {
  if (threads <= 0) threads = default_threads();
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) f(i);
      } catch (...) {
        errs[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace

// ---------------------------------------------------------------- rng

Rng::Rng(std::uint64_t seed, std::uint64_t index)
    : eng_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL))) {}

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::uniform_pos() { return (static_cast<double>(eng_() >> 11) + 1) * 0x1.0p-53; }

// ---------------------------------------------------------------- offspring laws

OffspringLaw OffspringLaw::geometric_half() { return {OffspringKind::geometric_half, 2.0}; }

OffspringLaw OffspringLaw::stable(double gamma) {
  check_gamma(gamma);
  return {OffspringKind::stable, gamma};
}

OffspringLaw OffspringLaw::for_gamma(double gamma) {
  check_gamma(gamma);
  return gamma == 2 ? geometric_half() : stable(gamma);
}

std::string OffspringLaw::name() const {
  return kind == OffspringKind::geometric_half ? "geometric_half" : "stable(" + std::to_string(gamma) + ")";
}

double OffspringLaw::pmf(std::int64_t k) const {
  if (k < 0) return 0;
  if (kind == OffspringKind::geometric_half) return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(k, 2000)) - 1);
  const double g = gamma;
  if (k == 0) return 1 / g;
  if (k == 1) return 0;
  if (k == 2) return (g - 1) / 2;
  // |binom(g, k)|/g = Gamma(g)|sin(pi g)| Gamma(k - g)/(pi k!)
  const double s = std::abs(boost::math::sin_pi(g));
  if (s == 0) return 0;
  return std::exp(std::lgamma(g) + std::log(s) - std::log(kPi) + std::lgamma(k - g) - std::lgamma(k + 1.0));
}

double OffspringLaw::tail(std::int64_t k) const {
  if (k < 0) return 1;
  if (kind == OffspringKind::geometric_half) return std::ldexp(1.0, static_cast<int>(-std::min<std::int64_t>(k, 2000)) - 1);
  const double g = gamma;
  if (k <= 1) return (g - 1) / g;
  if (std::abs(boost::math::sin_pi(g)) == 0) return 0;
  return std::exp(log_stable_tail(g, static_cast<double>(k)));
}

std::int64_t OffspringLaw::sample(Rng& rng) const {
  if (kind == OffspringKind::geometric_half) {
    std::int64_t k = 0;
    for (;;) {
      std::uint64_t b = rng.bits();
      if (b) return k + std::countr_zero(b);
      k += 64;
    }
  }
  return quantile(rng.uniform_pos());
}

std::int64_t OffspringLaw::quantile(double V) const {
  if (!(V > 0 && V <= 1)) throw DomainError("OffspringLaw::quantile: V must lie in (0, 1]");
  if (kind == OffspringKind::geometric_half) {
    // P(X > k) = 2^{-k-1} < V
    std::int64_t k = static_cast<std::int64_t>(std::floor(-std::log2(V)));
    while (k > 0 && tail(k - 1) < V) --k;
    while (!(tail(k) < V)) ++k;
    return k;
  }
  const auto& t = stable_tail_table(gamma);
  if (V > t.back()) {
    auto it = std::upper_bound(t.begin(), t.end(), V, [](double v, double x) { return v > x; });
    return static_cast<std::int64_t>(it - t.begin());
  }
  // tail beyond the table: solve log P(X > k) < log V on integers
  const double g = gamma, lv = std::log(V);
  auto below = [&](double k) { return log_stable_tail(g, k) < lv; };
  double lo = static_cast<double>(kTable);  // P(X > lo) >= V
  double hi = lo * std::pow(t.back() / V, 1 / g) * 2 + 2;
  while (!below(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    double mid = std::floor((lo + hi) / 2);
    (below(mid) ? hi : lo) = mid;
  }
  return static_cast<std::int64_t>(hi);
}

// ---------------------------------------------------------------- conditioned trees

ConditionedSampler::ConditionedSampler(const OffspringLaw& law, int n) : law_(law), n_(n) {
  if (n < 1) throw DomainError("ConditionedSampler: n must be positive");
  pmf_[1] = pmf_head(law, n);
  pmf_of(n);
  if (!(pmf_[n][n - 1] > 0)) throw DomainError("ConditionedSampler: no tree of this size has positive probability");
}

const std::vector<double>& ConditionedSampler::pmf_of(int m) {
  auto it = pmf_.find(m);
  if (it != pmf_.end()) return it->second;
  const int m1 = m / 2, m2 = m - m1;
  const auto& a = pmf_of(m1);
  const auto& b = pmf_of(m2);
  std::vector<double> c(static_cast<std::size_t>(n_), 0.0);
  for (int t = 0; t < n_; ++t) {
    double s = 0;
    for (int j = 0; j <= t; ++j) s += a[j] * b[t - j];
    c[t] = s;
  }
  return pmf_.emplace(m, std::move(c)).first->second;
}

double ConditionedSampler::block_pmf(int m, int t) const {
  auto it = pmf_.find(m);
  if (it == pmf_.end()) throw DomainError("block_pmf: size not used by the split");
  if (t < 0 || t >= n_) return 0;
  return it->second[t];
}

std::vector<int> ConditionedSampler::sample(Rng& rng) const {
  std::vector<int> x(static_cast<std::size_t>(n_), 0);
  struct Block {
    int off, m, t;
  };
  std::vector<Block> stack{{0, n_, n_ - 1}};
  while (!stack.empty()) {
    Block b = stack.back();
    stack.pop_back();
    if (b.t == 0) continue;
    if (b.m == 1) {
      x[b.off] = b.t;
      continue;
    }
    const int m1 = b.m / 2, m2 = b.m - m1;
    const auto& p1 = pmf_.at(m1);
    const auto& p2 = pmf_.at(m2);
    const double target = rng.uniform() * pmf_.at(b.m)[b.t];
    double acc = 0;
    int a = -1, last = -1;
    for (int j = 0; j <= b.t; ++j) {
      const double w = p1[j] * p2[b.t - j];
      if (w > 0) last = j;
      acc += w;
      if (acc > target && w > 0) {
        a = j;
        break;
      }
    }
    if (a < 0) a = last;  // rounding at the very end of the scan
    if (a < 0) throw SolverError("conditioned sampler: block has no admissible split", b.m, b.t);
    stack.push_back({b.off, m1, a});
    stack.push_back({b.off + m1, m2, b.t - a});
  }
  // cycle lemma: start right after the first minimum of the partial sums
  long s = 0, best = 1;
  int arg = 0;
  for (int i = 0; i < n_; ++i) {
    s += x[i] - 1;
    if (s < best) {
      best = s;
      arg = i;
    }
  }
  std::rotate(x.begin(), x.begin() + (arg + 1) % n_, x.end());
  return x;
}

std::vector<int> sample_conditioned_tree(const OffspringLaw& law, int n, Rng& rng) {
  if (n < 2) throw DomainError("sample_conditioned_tree: n must be at least 2");
  return ConditionedSampler(law, n).sample(rng);
}

void check_lukasiewicz(const std::vector<int>& path) {
  if (path.empty()) throw ValidationError("Lukasiewicz path: empty");
  long s = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] < 0) throw ValidationError("Lukasiewicz path: negative child count");
    s += path[i] - 1;
    if (s < 0 && i + 1 < path.size()) throw ValidationError("Lukasiewicz path: hits -1 before the end");
  }
  if (s != -1) throw ValidationError("Lukasiewicz path: counts must sum to n - 1");
}

// ---------------------------------------------------------------- tree statistics

PlaneTree::PlaneTree(const std::vector<int>& path) {
  check_lukasiewicz(path);
  const int n = static_cast<int>(path.size());
  parent.assign(n, -1);
  depth.assign(n, 0);
  std::vector<int> stack, rem(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      while (rem[stack.back()] == 0) stack.pop_back();
      const int p = stack.back();
      --rem[p];
      parent[i] = p;
      depth[i] = depth[p] + 1;
    }
    rem[i] = path[i];
    if (path[i] > 0) stack.push_back(i);
  }
  adj_off.assign(n + 1, 0);
  for (int i = 1; i < n; ++i) {
    ++adj_off[i + 1];
    ++adj_off[parent[i] + 1];
  }
  for (int i = 0; i < n; ++i) adj_off[i + 1] += adj_off[i];
  adj.resize(adj_off[n]);
  std::vector<int> fill(adj_off.begin(), adj_off.end() - 1);
  for (int i = 1; i < n; ++i) {
    adj[fill[i]++] = parent[i];
    adj[fill[parent[i]]++] = i;
  }
}

int PlaneTree::bfs(int s, std::vector<int>& dist, std::vector<int>* pred, int blocked) const {
  const int n = size();
  dist.assign(n, -1);
  if (pred) pred->assign(n, -1);
  std::vector<int> q;
  q.reserve(n);
  q.push_back(s);
  dist[s] = 0;
  int far = s;
  for (std::size_t h = 0; h < q.size(); ++h) {
    const int u = q[h];
    if (dist[u] > dist[far]) far = u;
    for (int e = adj_off[u]; e < adj_off[u + 1]; ++e) {
      const int w = adj[e];
      if (dist[w] >= 0 || w == blocked) continue;
      dist[w] = dist[u] + 1;
      if (pred) (*pred)[w] = u;
      q.push_back(w);
    }
  }
  return far;
}

TreeStats height_and_diameter(const PlaneTree& t) {
  std::vector<int> dist;
  const int a = t.bfs(0, dist);
  TreeStats s;
  s.height = dist[a];
  const int b = t.bfs(a, dist);
  s.diameter = dist[b];
  return s;
}

TreeStats height_and_diameter(const std::vector<int>& path) { return height_and_diameter(PlaneTree(path)); }

int diameter_bruteforce(const PlaneTree& t) {
  int D = 0;
  std::vector<int> dist;
  for (int s = 0; s < t.size(); ++s) {
    t.bfs(s, dist);
    D = std::max(D, *std::max_element(dist.begin(), dist.end()));
  }
  return D;
}

void midpoint_structure_check(const std::vector<int>& path, MidpointReport& rep) {
  const PlaneTree t(path);
  ++rep.trees;
  std::vector<int> dist, pred;
  const int a = t.bfs(0, dist);
  const int G = dist[a];
  const int b = t.bfs(a, dist, &pred);
  const int D = dist[b];
  if (!(G <= D && D <= 2 * G)) ++rep.bound_violations;
  // walk from b back to a; centre at distance floor(D/2), ceil(D/2) from a
  std::vector<int> route{b};
  while (route.back() != a) route.push_back(pred[route.back()]);
  const int c1 = route[D - D / 2], c2 = route[D / 2];  // dist(a, c1) = D/2 rounded down
  if (t.depth[c1] + t.depth[c2] != 2 * G - D) ++rep.midpoint_violations;

  // endpoints of diameter pairs, grouped by the side of the centre they hang from
  std::vector<int> shallow_groups;
  int endpoints = 0;
  auto scan = [&](int centre, int blocked, int radius, bool by_branch) {
    std::vector<int> d, p;
    t.bfs(centre, d, &p, blocked);
    for (int v = 0; v < t.size(); ++v) {
      if (d[v] != radius) continue;
      ++endpoints;
      if (t.depth[v] >= G) continue;
      int g = blocked;  // odd D: one group per side
      if (by_branch) {
        g = v;
        while (p[g] != centre) g = p[g];
      }
      shallow_groups.push_back(g);
    }
  };
  if (D % 2 == 0) {
    scan(c1, -1, D / 2, true);
  } else {
    scan(c1, c2, D / 2, false);
    scan(c2, c1, D / 2, false);
  }
  if (endpoints > 2) ++rep.diameter_pairs_checked;
  std::sort(shallow_groups.begin(), shallow_groups.end());
  if (std::unique(shallow_groups.begin(), shallow_groups.end()) - shallow_groups.begin() >= 2)
    ++rep.endpoint_violations;
}

MidpointReport midpoint_structure_check(const std::vector<std::vector<int>>& paths) {
  MidpointReport rep;
  for (const auto& p : paths) midpoint_structure_check(p, rep);
  return rep;
}

// ---------------------------------------------------------------- experiment

namespace {
double cdf_or_asymptote(double r, double g, bool height, bool* used_asymptote) {
  try {
    return 1 - (height ? nr_height_tail(r, g) : nr_diam_tail(r, g));
  } catch (const UnsupportedError&) {
    if (used_asymptote) *used_asymptote = true;
    return std::min(1.0, height ? height_cdf_asymptote(r, g) : diam_cdf_asymptote(r, g));
  }
}
}  // namespace

double nr_height_cdf(double r, double gamma, bool* used) { return cdf_or_asymptote(r, gamma, true, used); }
double nr_diam_cdf(double r, double gamma, bool* used) { return cdf_or_asymptote(r, gamma, false, used); }

double ks_mean_normalized(const std::vector<int>& samples, double analytic_mean,
                          const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("ks_mean_normalized: no samples");
  std::vector<int> s(samples);
  std::sort(s.begin(), s.end());
  double mean = 0;
  for (int v : s) mean += v;
  mean /= static_cast<double>(s.size());
  if (!(mean > 0)) throw DomainError("ks_mean_normalized: mean must be positive");
  const double N = static_cast<double>(s.size());
  double ks = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double r = s[i] / mean * analytic_mean;
    const double F = r > 0 ? cdf(r) : 0.0;
    ks = std::max({ks, std::abs(i / N - F), std::abs(j / N - F)});
    i = j;
  }
  return ks;
}

SimReport run_experiment(double gamma, int n, int M, std::uint64_t seed, const SimConfig& cfg) {
  check_gamma(gamma);
  if (n < 2) throw DomainError("run_experiment: n must be at least 2");
  if (M < 1) throw DomainError("run_experiment: M must be positive");
  SimReport rep;
  rep.gamma = gamma;
  rep.n = n;
  rep.M = M;
  rep.seed = seed;
  const OffspringLaw law = OffspringLaw::for_gamma(gamma);
  rep.law = law.name();
  const ConditionedSampler sampler(law, n);

  std::vector<int> H(M), Dm(M);
  std::vector<MidpointReport> parts;
  std::mutex mu;
  parallel_for(M, cfg.threads, [&](int i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    const auto path = sampler.sample(rng);
    const PlaneTree t(path);
    const auto st = height_and_diameter(t);
    H[i] = st.height;
    Dm[i] = st.diameter;
    if (cfg.check_structure) {
      MidpointReport one;
      midpoint_structure_check(path, one);
      if (one.bound_violations + one.endpoint_violations + one.midpoint_violations > 0 ||
          one.diameter_pairs_checked > 0) {
        std::lock_guard<std::mutex> lock(mu);
        parts.push_back(one);
      }
    }
  });
  if (cfg.check_structure) {
    rep.structure_checked = true;
    rep.structure.trees = M;
    for (const auto& p : parts) {
      rep.structure.bound_violations += p.bound_violations;
      rep.structure.endpoint_violations += p.endpoint_violations;
      rep.structure.midpoint_violations += p.midpoint_violations;
      rep.structure.diameter_pairs_checked += p.diameter_pairs_checked;
    }
  }

  // sequential sums in replica order
  double sh = 0, sd = 0;
  for (int i = 0; i < M; ++i) {
    sh += H[i];
    sd += Dm[i];
  }
  rep.mean_height = sh / M;
  rep.mean_diam = sd / M;
  rep.ratio = rep.mean_diam / rep.mean_height;
  const auto mom = moments(gamma);
  rep.analytic_mean_height = mom.mean_height;
  rep.analytic_mean_diam = mom.mean_diam;
  rep.analytic_ratio = mom.ratio;
  rep.kappa = mom.mean_height / (rep.mean_height * std::pow(n, -(gamma - 1) / gamma));
  auto counted = [&](bool height) {
    return [&, height](double r) {
      bool used = false;
      const double F = cdf_or_asymptote(r, gamma, height, &used);
      rep.ks_asymptote_points += used;
      return F;
    };
  };
  rep.ks_height = ks_mean_normalized(H, mom.mean_height, counted(true));
  rep.ks_diam = ks_mean_normalized(Dm, mom.mean_diam, counted(false));
  if (cfg.keep_replicas) {
    rep.heights = std::move(H);
    rep.diams = std::move(Dm);
  }
  return rep;
}

}  // namespace levytree
