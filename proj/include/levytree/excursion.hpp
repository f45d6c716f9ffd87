#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levytree/common.hpp"

namespace levytree {

// Piecewise-linear nonnegative function on [0, zeta]; linear between
// breakpoints. values[0] may be positive.
struct PLPath {
  std::vector<double> t;
  std::vector<double> h;

  PLPath() = default;
  PLPath(std::vector<double> times, std::vector<double> values);

  std::size_t size() const { return t.size(); }
  double lifetime() const { return t.empty() ? 0.0 : t.back(); }
  double at(double s) const;
};

// Coding function: PLPath with h(0) = h(zeta) = 0 and h != 0.
struct PLExcursion : PLPath {
  PLExcursion() = default;
  PLExcursion(std::vector<double> times, std::vector<double> values);
  explicit PLExcursion(const PLPath& p);
};

inline constexpr double kSnapTol = 1e-12;

// Drop collinear interior breakpoints and merge times closer than tol.
PLPath normalize(const PLPath& p, double tol = kSnapTol);
// Sup-norm distance over the union of breakpoints; lifetimes must agree
// within tol or the result is +inf.
double max_abs_diff(const PLPath& a, const PLPath& b, double tol = 1e-9);

double dist(const PLPath& H, double s, double t);

struct HeightResult {
  double Gamma;
  double tau;
};
HeightResult total_height(const PLPath& H);

struct DiameterResult {
  double D;
  double tau0;
  double tau1;
};
DiameterResult diameter(const PLExcursion& H);

PLExcursion reroot(const PLExcursion& H, double t0);
PLExcursion concat(const PLExcursion& a, const PLExcursion& b);
PLExcursion reverse(const PLExcursion& H);

struct HeightSplit {
  PLExcursion minus;
  std::optional<PLExcursion> plus;  // empty when nothing is left outside the split
  double tau_minus;
  double tau_plus;
};
// x in (0, Gamma]. For x = Gamma the split times are the zeros of H
// surrounding tau.
HeightSplit height_split(const PLExcursion& H, double x);

struct SpinalAtom {
  double a;
  std::optional<PLExcursion> left;
  std::optional<PLExcursion> right;
};

// Atoms plus the residual non-increasing spine on each side. Spine
// pieces carry the time PL functions spend on monotone or flat stretches
// of the geodesic, which the continuum picture does not see.
struct SpinalDecomposition {
  double spine_height = 0;
  std::vector<SpinalAtom> atoms;  // sorted by a
  PLPath left_spine;
  PLPath right_spine;
  double lifetime = 0;

  double spine_time() const { return left_spine.lifetime() + right_spine.lifetime(); }
};

SpinalDecomposition spinal_decompose(const PLExcursion& H, double t0, double t1);
inline SpinalDecomposition spinal_decompose(const PLExcursion& H, double t) {
  return spinal_decompose(H, 0.0, t);
}

struct Reconstruction {
  double t;
  PLExcursion H;
};
Reconstruction reconstruct(const SpinalDecomposition& M);

// I/O: CSV with header "t,h" or a JSON array of [t, h] pairs.
PLExcursion read_excursion(const std::string& path);
PLExcursion parse_excursion_csv(const std::string& text);
PLExcursion parse_excursion_json(const std::string& text);
std::string to_csv(const PLPath& p);

}  // namespace levytree
