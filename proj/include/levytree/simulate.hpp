#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "levytree/common.hpp"

namespace levytree {

// Per-replica stream: a 64-bit engine keyed by a hash of (seed, index), so
// replica i draws the same numbers whatever thread runs it.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index);
  std::uint64_t bits() { return eng_(); }
  double uniform();  // in [0, 1), 53 bits
  double uniform_pos();  // in (0, 1]

 private:
  std::mt19937_64 eng_;
};

enum class OffspringKind { geometric_half, stable };

// Critical offspring laws with mean exactly 1.
//   geometric_half: p_k = 2^{-k-1}
//   stable(gamma):  f(s) = s + (1 - s)^gamma/gamma, so p_0 = 1/gamma, p_1 = 0,
//                   p_k = |binom(gamma, k)|/gamma for k >= 2, P(X > k) = |binom(gamma - 1, k)|/gamma
struct OffspringLaw {
  OffspringKind kind = OffspringKind::geometric_half;
  double gamma = 2;

  static OffspringLaw geometric_half();
  static OffspringLaw stable(double gamma);
  // geometric_half at gamma = 2, stable otherwise
  static OffspringLaw for_gamma(double gamma);

  double pmf(std::int64_t k) const;
  double tail(std::int64_t k) const;  // P(X > k)
  double mean() const { return 1.0; }
  // Unconditioned draw: inverse CDF over a table up to kTable, exact tail inversion beyond.
  std::int64_t sample(Rng& rng) const;
  // min{k : P(X > k) < V}, V in (0, 1]
  std::int64_t quantile(double V) const;

  static constexpr std::int64_t kTable = 1000000;
  std::string name() const;
};

// Exact sampler of n i.i.d. offspring counts conditioned on summing to n - 1,
// rotated by the cycle lemma into a Lukasiewicz sequence (children counts in
// depth-first order). Splits the index range in halves and draws each split
// sum from pmf_{m1}(a) pmf_{m2}(t - a), so no rejection is needed.
class ConditionedSampler {
 public:
  ConditionedSampler(const OffspringLaw& law, int n);
  std::vector<int> sample(Rng& rng) const;
  int n() const { return n_; }
  const OffspringLaw& law() const { return law_; }
  // P(S_m = t) for the block sizes used by the split
  double block_pmf(int m, int t) const;

 private:
  const std::vector<double>& pmf_of(int m);
  OffspringLaw law_;
  int n_;
  std::map<int, std::vector<double>> pmf_;
};

std::vector<int> sample_conditioned_tree(const OffspringLaw& law, int n, Rng& rng);

// Throws ValidationError unless counts are >= 0, sum to n - 1 and the partial
// sums of (count - 1) stay >= 0 before the last step.
void check_lukasiewicz(const std::vector<int>& path);

// Plane tree from a Lukasiewicz sequence; vertex 0 is the root, vertices in depth-first order.
struct PlaneTree {
  std::vector<int> parent;  // parent[0] = -1
  std::vector<int> depth;
  std::vector<int> adj_off, adj;  // undirected adjacency (CSR)
  explicit PlaneTree(const std::vector<int>& path);
  int size() const { return static_cast<int>(parent.size()); }
  // BFS distances from s; also returns one farthest vertex
  int bfs(int s, std::vector<int>& dist, std::vector<int>* pred = nullptr, int blocked = -1) const;
};

struct TreeStats {
  int height = 0;
  int diameter = 0;
};
// Height from the root sweep, diameter from the second sweep at a deepest vertex.
TreeStats height_and_diameter(const std::vector<int>& path);
TreeStats height_and_diameter(const PlaneTree& t);
// All-pairs reference, O(n^2).
int diameter_bruteforce(const PlaneTree& t);

struct MidpointReport {
  int trees = 0;
  int bound_violations = 0;     // Gamma <= D <= 2 Gamma
  int endpoint_violations = 0;  // some diameter pair has both endpoints below full height
  int midpoint_violations = 0;  // midpoint depth differs from Gamma - D/2
  int diameter_pairs_checked = 0;  // trees with more than one diameter pair
};
// Exhaustive over all diameter pairs: all of them share the centre vertex (even D)
// or centre edge (odd D), so endpoints are grouped by branch at the centre.
MidpointReport midpoint_structure_check(const std::vector<std::vector<int>>& paths);
void midpoint_structure_check(const std::vector<int>& path, MidpointReport& rep);

struct SimConfig {
  int threads = 0;  // <= 0: default_threads()
  bool check_structure = false;
  bool keep_replicas = true;
};

struct SimReport {
  double gamma = 2;
  int n = 0;
  int M = 0;
  std::uint64_t seed = 0;
  std::string law;
  double kappa = 0;
  double mean_height = 0, mean_diam = 0, ratio = 0;
  double analytic_mean_height = 0, analytic_mean_diam = 0, analytic_ratio = 0;
  double ks_height = 0, ks_diam = 0;
  // analytic CDF points that fell below the series radius and used the small-r asymptote
  int ks_asymptote_points = 0;
  MidpointReport structure;
  bool structure_checked = false;
  std::vector<int> heights, diams;  // per replica, if kept
};

// Mean-normalized KS distance of integer samples against x -> cdf(x * mean).
// Both one-sided limits at every atom are compared.
double ks_mean_normalized(const std::vector<int>& samples, double analytic_mean,
                          const std::function<double(double)>& cdf);

// Analytic N_nr CDFs with the small-r asymptote below the series radius;
// used_asymptote (if given) is set when that happens.
double nr_height_cdf(double r, double gamma, bool* used_asymptote = nullptr);
double nr_diam_cdf(double r, double gamma, bool* used_asymptote = nullptr);

SimReport run_experiment(double gamma, int n, int M, std::uint64_t seed, const SimConfig& cfg = {});

}  // namespace levytree
