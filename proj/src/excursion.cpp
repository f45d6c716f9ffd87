#include "levytree/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace levytree {

namespace {

struct Pt {
  double t, h;
};


PLPath from_points(const std::vector<Pt>& pts) {
  std::vector<double> t(pts.size()), h(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    t[i] = pts[i].t;
    h[i] = pts[i].h;
  }
  return PLPath(std::move(t), std::move(h));
}

double scale_of(const PLPath& p) {
  double s = 1.0;
  for (double v : p.h) s = std::max(s, std::abs(v));
  return s;
}

// Restriction of p to [0, T] where p(T) is (numerically) zero.
PLPath truncate_at_zero(const PLPath& p, double T) {
  std::vector<Pt> out;
  for (std::size_t i = 0; i < p.size() && p.t[i] < T - kSnapTol; ++i) out.push_back({p.t[i], p.h[i]});
  out.push_back({T, 0.0});
  return from_points(out);
}

// Keep the first of any run of points closer than tol in time, but always
// keep the final point.
void dedupe_times(std::vector<Pt>& v, double tol) {
  std::vector<Pt> o;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (o.empty() || v[i].t > o.back().t + tol) {
      o.push_back(v[i]);
    } else if (i + 1 == v.size()) {
      if (o.size() > 1) o.back() = v[i];
      else o.push_back(v[i]);
    }
  }
  v.swap(o);
}

bool has_positive(const PLPath& p) {
  return std::any_of(p.h.begin(), p.h.end(), [](double v) { return v > 0; });
}

}  // namespace

PLPath::PLPath(std::vector<double> times, std::vector<double> values)
    : t(std::move(times)), h(std::move(values)) {
  if (t.size() != h.size()) throw ValidationError("PLPath: times and values differ in length");
  if (t.empty()) throw ValidationError("PLPath: empty");
  if (t[0] != 0.0) throw ValidationError("PLPath: first time must be 0");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw ValidationError("PLPath: times must be strictly increasing");
  for (double& v : h) {
    if (!std::isfinite(v) || v < -kSnapTol) throw ValidationError("PLPath: values must be finite and nonnegative");
    if (v < 0) v = 0;
  }
}

double PLPath::at(double s) const {
  const double z = lifetime();
  if (s < -kSnapTol || s > z + kSnapTol || std::isnan(s)) throw DomainError("time outside [0, zeta]");
  if (s <= 0) return h.front();
  if (s >= z) return h.back();
  auto it = std::upper_bound(t.begin(), t.end(), s);
  std::size_t j = static_cast<std::size_t>(it - t.begin());
  std::size_t i = j - 1;
  double w = (s - t[i]) / (t[j] - t[i]);
  return h[i] + w * (h[j] - h[i]);
}

PLExcursion::PLExcursion(std::vector<double> times, std::vector<double> values)
    : PLPath(std::move(times), std::move(values)) {
  if (size() < 2) throw ValidationError("PLExcursion: need at least two breakpoints");
  if (h.front() != 0.0 || h.back() != 0.0) throw ValidationError("PLExcursion: must start and end at 0");
  if (!has_positive(*this)) throw ValidationError("PLExcursion: identically zero");
}

PLExcursion::PLExcursion(const PLPath& p) : PLExcursion(p.t, p.h) {}

PLPath normalize(const PLPath& p, double tol) {
  if (p.size() <= 2) return p;
  const double sc = scale_of(p);
  std::vector<Pt> merged;
  merged.push_back({p.t[0], p.h[0]});
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p.t[i] - merged.back().t <= tol) {
      if (i + 1 == p.size()) merged.back() = {p.t[i], p.h[i]};
      continue;
    }
    merged.push_back({p.t[i], p.h[i]});
  }
  if (merged.size() == 1) merged.push_back({p.t.back(), p.h.back()});
  std::vector<Pt> out;
  out.push_back(merged[0]);
  for (std::size_t i = 1; i + 1 < merged.size(); ++i) {
    const Pt& a = out.back();
    const Pt& b = merged[i];
    const Pt& c = merged[i + 1];
    double interp = a.h + (c.h - a.h) * (b.t - a.t) / (c.t - a.t);
    if (std::abs(interp - b.h) > tol * sc) out.push_back(b);
  }
  out.push_back(merged.back());
  return from_points(out);
}

double max_abs_diff(const PLPath& a, const PLPath& b, double tol) {
  if (std::abs(a.lifetime() - b.lifetime()) > tol) return std::numeric_limits<double>::infinity();
  double z = std::min(a.lifetime(), b.lifetime());
  double m = 0;
  auto probe = [&](double s) {
    s = std::min(s, z);
    m = std::max(m, std::abs(a.at(s) - b.at(s)));
  };
  for (double s : a.t) probe(s);
  for (double s : b.t) probe(s);
  return m;
}

double dist(const PLPath& H, double s, double t) {
  double lo = std::min(s, t), hi = std::max(s, t);
  double hs = H.at(s), ht = H.at(t);
  double m = std::min(hs, ht);
  auto first = std::upper_bound(H.t.begin(), H.t.end(), lo);
  for (auto it = first; it != H.t.end() && *it < hi; ++it) m = std::min(m, H.h[it - H.t.begin()]);
  return std::max(0.0, hs + ht - 2 * m);
}

HeightResult total_height(const PLPath& H) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < H.size(); ++i)
    if (H.h[i] > H.h[k]) k = i;
  return {H.h[k], H.t[k]};
}

DiameterResult diameter(const PLExcursion& H) {
  const std::size_t n = H.size();
  std::vector<double> P(n), S(n);
  std::vector<std::size_t> pidx(n), sidx(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || H.h[k] > P[k - 1]) {
      P[k] = H.h[k];
      pidx[k] = k;
    } else {
      P[k] = P[k - 1];
      pidx[k] = pidx[k - 1];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    if (k == n - 1 || H.h[k] >= S[k + 1]) {
      S[k] = H.h[k];
      sidx[k] = k;
    } else {
      S[k] = S[k + 1];
      sidx[k] = sidx[k + 1];
    }
  }
  double D = 0;
  for (std::size_t k = 0; k < n; ++k) D = std::max(D, P[k] + S[k] - 2 * H.h[k]);
  const double tol = kSnapTol * scale_of(H);
  // Optimal pairs are exactly (i, j) with i <= k <= j, k optimal, H_i = P_k
  // and H_j = S_k; pick the lexicographically smallest.
  std::size_t kstar = n;
  for (std::size_t k = 0; k < n && kstar == n; ++k)
    if (P[k] + S[k] - 2 * H.h[k] >= D - tol) kstar = k;
  std::size_t i0 = pidx[kstar];
  std::size_t j0 = n;
  for (std::size_t k = kstar; k < n; ++k) {
    if (P[k] + S[k] - 2 * H.h[k] < D - tol) continue;
    if (pidx[k] != i0) break;  // prefix max moved past H_{i0}
    j0 = std::min(j0, sidx[k]);
  }
  return {D, H.t[i0], H.t[j0]};
}

namespace {

// g(u) = d(t0, u) sampled at every breakpoint of g on [t0, zeta]
// (forward = true) or [0, t0] (forward = false, returned in increasing u).
std::vector<Pt> dist_profile(const PLPath& H, double t0, bool forward) {
  const double h0 = H.at(t0);
  std::vector<Pt> seq;  // walk order, starting at t0
  seq.push_back({t0, h0});
  if (forward) {
    for (std::size_t i = 0; i < H.size(); ++i)
      if (H.t[i] > t0) seq.push_back({H.t[i], H.h[i]});
  } else {
    for (std::size_t i = H.size(); i-- > 0;)
      if (H.t[i] < t0) seq.push_back({H.t[i], H.h[i]});
  }
  std::vector<Pt> out;
  out.push_back({t0, 0.0});
  double m = h0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const Pt& a = seq[i - 1];
    const Pt& b = seq[i];
    if (b.h < m) {
      if (a.h > m) {
        double w = (a.h - m) / (a.h - b.h);
        out.push_back({a.t + w * (b.t - a.t), h0 - m});
      }
      m = b.h;
      out.push_back({b.t, std::max(0.0, h0 - b.h)});
    } else {
      out.push_back({b.t, std::max(0.0, h0 + b.h - 2 * m)});
    }
  }
  if (!forward) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

PLExcursion reroot(const PLExcursion& H, double t0) {
  const double z = H.lifetime();
  if (t0 < -kSnapTol || t0 > z + kSnapTol) throw DomainError("reroot: t0 outside [0, zeta]");
  t0 = std::clamp(t0, 0.0, z);
  if (t0 <= kSnapTol || t0 >= z - kSnapTol) return H;
  auto fwd = dist_profile(H, t0, true);
  auto bwd = dist_profile(H, t0, false);
  std::vector<Pt> out;
  for (const Pt& p : fwd) out.push_back({p.t - t0, p.h});
  for (std::size_t i = 1; i < bwd.size(); ++i) out.push_back({bwd[i].t + z - t0, bwd[i].h});
  out.front() = {0.0, 0.0};
  out.back() = {z, 0.0};
  // Crossing points can land within rounding of an existing breakpoint.
  dedupe_times(out, kSnapTol * z);
  out.back() = {z, 0.0};
  return PLExcursion(normalize(from_points(out)));
}

PLExcursion concat(const PLExcursion& a, const PLExcursion& b) {
  std::vector<double> t = a.t, h = a.h;
  const double z = a.lifetime();
  for (std::size_t i = 1; i < b.size(); ++i) {
    t.push_back(z + b.t[i]);
    h.push_back(b.h[i]);
  }
  return PLExcursion(std::move(t), std::move(h));
}

PLExcursion reverse(const PLExcursion& H) {
  const double z = H.lifetime();
  std::vector<double> t, h;
  for (std::size_t i = H.size(); i-- > 0;) {
    t.push_back(z - H.t[i]);
    h.push_back(H.h[i]);
  }
  t.front() = 0.0;
  t.back() = z;
  return PLExcursion(std::move(t), std::move(h));
}

HeightSplit height_split(const PLExcursion& H, double x) {
  auto [G, tau] = total_height(H);
  if (!(x > 0) || x > G * (1 + kSnapTol)) throw DomainError("height_split: x outside (0, Gamma]");
  std::size_t k = static_cast<std::size_t>(std::find(H.t.begin(), H.t.end(), tau) - H.t.begin());
  double tm, tp;
  if (x >= G * (1 - kSnapTol)) {
    std::size_t i = k;
    while (H.h[i] > 0) --i;
    std::size_t j = k;
    while (H.h[j] > 0) ++j;
    tm = H.t[i];
    tp = H.t[j];
  } else {
    const double L = G - x;
    std::size_t i = k;
    while (!(H.h[i] < L)) --i;
    tm = H.t[i] + (L - H.h[i]) / (H.h[i + 1] - H.h[i]) * (H.t[i + 1] - H.t[i]);
    std::size_t j = k;
    while (!(H.h[j] < L)) ++j;
    tp = H.t[j - 1] + (H.h[j - 1] - L) / (H.h[j - 1] - H.h[j]) * (H.t[j] - H.t[j - 1]);
  }
  const double z = H.lifetime();
  HeightSplit out{PLExcursion(truncate_at_zero(reroot(H, tm), tp - tm)), std::nullopt, tm, tp};
  double rest = z - (tp - tm);
  if (rest > kSnapTol * std::max(1.0, z)) {
    PLPath p = truncate_at_zero(reroot(H, tp), rest);
    if (has_positive(p)) out.plus = PLExcursion(p);
  }
  return out;
}

namespace {

struct SideDecomp {
  PLPath spine;
  std::vector<std::pair<double, PLExcursion>> excursions;  // (level L, E)
};

// Insert the points where h first drops strictly below its running minimum
// in the middle of a segment.
std::vector<Pt> augment_running_min(const std::vector<Pt>& h) {
  std::vector<Pt> out;
  out.push_back(h[0]);
  double m = h[0].h;
  for (std::size_t i = 1; i < h.size(); ++i) {
    const Pt& a = h[i - 1];
    const Pt& b = h[i];
    if (b.h < m && a.h > m) {
      double w = (a.h - m) / (a.h - b.h);
      double tc = a.t + w * (b.t - a.t);
      if (tc > out.back().t && tc < b.t) out.push_back({tc, m});
    }
    m = std::min(m, b.h);
    out.push_back(b);
  }
  return out;
}

SideDecomp decompose_side(const std::vector<Pt>& raw) {
  SideDecomp res;
  std::vector<Pt> h = augment_running_min(raw);
  const std::size_t n = h.size();
  std::vector<Pt> spine;
  double shift = 0;  // time removed so far
  double m = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  while (k < n) {
    spine.push_back({h[k].t - shift, h[k].h});
    bool record = h[k].h < m;
    m = std::min(m, h[k].h);
    if (!record || k + 1 >= n || h[k + 1].h < h[k].h) {
      ++k;
      continue;
    }
    const double L = h[k].h;
    std::size_t r = k + 1;
    while (r + 1 < n && !(h[r + 1].h < L)) ++r;
    // h[r] is the last point >= L; it has value L unless r is the end.
    std::size_t p = r;
    while (p > k && !(h[p].h > L)) --p;
    if (p == k) {
      ++k;  // flat stretch only; stays on the spine
      continue;
    }
    std::size_t q = p + 1;
    std::vector<double> et, eh;
    for (std::size_t i = k; i <= q; ++i) {
      et.push_back(h[i].t - h[k].t);
      eh.push_back(i == q ? 0.0 : h[i].h - L);
    }
    PLExcursion E(std::move(et), std::move(eh));
    shift += h[q].t - h[k].t;
    res.excursions.emplace_back(L, std::move(E));
    k = q + 1;
  }
  res.spine = from_points(spine);
  return res;
}

std::vector<Pt> rebuild_side(const PLPath& spine, const std::vector<std::pair<double, const PLExcursion*>>& exc) {
  // exc sorted by level L decreasing
  std::vector<Pt> out;
  double shift = 0;
  std::size_t e = 0;
  const std::size_t n = spine.size();
  const double tol = kSnapTol * scale_of(spine);
  for (std::size_t i = 0; i < n; ++i) {
    const double hv = spine.h[i];
    while (e < exc.size() && exc[e].first >= hv - tol) {
      double L = exc[e].first;
      double tl;
      if (i == 0 || std::abs(hv - L) <= tol) {
        L = hv;
        tl = spine.t[i];
        if (out.empty() || out.back().t < tl + shift) out.push_back({tl + shift, L});
      } else {
        const double ha = spine.h[i - 1], ta = spine.t[i - 1];
        tl = ta + (ha - L) / (ha - hv) * (spine.t[i] - ta);
        out.push_back({tl + shift, L});
      }
      const PLExcursion& E = *exc[e].second;
      for (std::size_t j = 1; j < E.size(); ++j) out.push_back({tl + shift + E.t[j], E.h[j] + L});
      shift += E.lifetime();
      ++e;
    }
    if (out.empty() || spine.t[i] + shift > out.back().t) out.push_back({spine.t[i] + shift, hv});
  }
  if (e != exc.size()) throw ValidationError("reconstruct: atom level not reached by spine");
  return out;
}

void validate_spine(const PLPath& s, double A) {
  if (s.size() == 0) throw ValidationError("reconstruct: empty spine");
  if (std::abs(s.h.front() - A) > 1e-9 * std::max(1.0, A)) throw ValidationError("reconstruct: spine must start at spine_height");
  if (s.h.back() > 1e-9 * std::max(1.0, A)) throw ValidationError("reconstruct: spine must end at 0");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s.h[i] > s.h[i - 1]) throw ValidationError("reconstruct: spine must be non-increasing");
}

}  // namespace

SpinalDecomposition spinal_decompose(const PLExcursion& H, double t0, double t1) {
  const double z = H.lifetime();
  if (!(t0 < t1)) throw DomainError("spinal_decompose: need t0 < t1");
  if (t0 < -kSnapTol || t1 > z + kSnapTol) throw DomainError("spinal_decompose: times outside [0, zeta]");
  PLExcursion G = t0 > 0 ? reroot(H, t0) : H;
  const double t = std::min(t1 - t0, z);
  const double A = G.at(t);
  std::vector<Pt> left{{0.0, A}}, right{{0.0, A}};
  for (std::size_t i = G.size(); i-- > 0;)
    if (G.t[i] < t) left.push_back({t - G.t[i], G.h[i]});
  for (std::size_t i = 0; i < G.size(); ++i)
    if (G.t[i] > t) right.push_back({G.t[i] - t, G.h[i]});
  // drop points that coincide with t after rounding
  dedupe_times(left, kSnapTol * z);
  dedupe_times(right, kSnapTol * z);
  SideDecomp L = decompose_side(left), R = decompose_side(right);

  SpinalDecomposition M;
  M.spine_height = A;
  M.left_spine = L.spine;
  M.right_spine = R.spine;
  M.lifetime = z;
  std::map<double, SpinalAtom> by_a;
  for (auto& [lev, E] : L.excursions) {
    double a = A - lev;
    auto& at = by_a.try_emplace(a, SpinalAtom{a, std::nullopt, std::nullopt}).first->second;
    at.left = E;
  }
  for (auto& [lev, E] : R.excursions) {
    double a = A - lev;
    auto& at = by_a.try_emplace(a, SpinalAtom{a, std::nullopt, std::nullopt}).first->second;
    at.right = E;
  }
  for (auto& [a, at] : by_a) M.atoms.push_back(at);
  return M;
}

Reconstruction reconstruct(const SpinalDecomposition& M) {
  const double A = M.spine_height;
  validate_spine(M.left_spine, A);
  validate_spine(M.right_spine, A);
  double total = M.spine_time();
  std::vector<std::pair<double, const PLExcursion*>> le, re;
  double prev = -1;
  for (const SpinalAtom& at : M.atoms) {
    if (at.a <= prev) throw ValidationError("reconstruct: atoms must have distinct increasing a");
    if (at.a < 0 || at.a > A * (1 + 1e-12)) throw ValidationError("reconstruct: atom level outside [0, spine_height]");
    if (!at.left && !at.right) throw ValidationError("reconstruct: atom with two null sides");
    prev = at.a;
    double L = std::max(0.0, A - at.a);
    if (at.left) {
      le.emplace_back(L, &*at.left);
      total += at.left->lifetime();
    }
    if (at.right) {
      re.emplace_back(L, &*at.right);
      total += at.right->lifetime();
    }
  }
  if (std::abs(total - M.lifetime) > 1e-9 * std::max(1.0, M.lifetime))
    throw ValidationError("reconstruct: lifetimes do not add up");
  auto hl = rebuild_side(M.left_spine, le);
  auto hr = rebuild_side(M.right_spine, re);
  const double t = hl.back().t;
  std::vector<Pt> out;
  for (std::size_t i = hl.size(); i-- > 0;) out.push_back({t - hl[i].t, hl[i].h});
  out.front() = {0.0, 0.0};
  for (std::size_t i = 1; i < hr.size(); ++i) out.push_back({t + hr[i].t, hr[i].h});
  out.back().h = 0.0;
  dedupe_times(out, kSnapTol * std::max(1.0, out.back().t));
  return {t, PLExcursion(normalize(from_points(out)))};
}

PLExcursion parse_excursion_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> t, h;
  bool header = false;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; }),
               line.end());
    if (!header) {
      if (line != "t,h") throw ValidationError("excursion CSV: expected header 't,h'");
      header = true;
      continue;
    }
    auto c = line.find(',');
    if (c == std::string::npos) throw ValidationError("excursion CSV: malformed row '" + line + "'");
    try {
      t.push_back(std::stod(line.substr(0, c)));
      h.push_back(std::stod(line.substr(c + 1)));
    } catch (const std::exception&) {
      throw ValidationError("excursion CSV: malformed row '" + line + "'");
    }
  }
  return PLExcursion(std::move(t), std::move(h));
}

PLExcursion parse_excursion_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("excursion JSON: ") + e.what());
  }
  if (!j.is_array()) throw ValidationError("excursion JSON: expected an array of [t, h] pairs");
  std::vector<double> t, h;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw ValidationError("excursion JSON: expected [t, h] pairs");
    t.push_back(p[0].get<double>());
    h.push_back(p[1].get<double>());
  }
  return PLExcursion(std::move(t), std::move(h));
}

PLExcursion read_excursion(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string s = ss.str();
  auto b = s.find_first_not_of(" \t\r\n");
  if (b != std::string::npos && s[b] == '[') return parse_excursion_json(s);
  return parse_excursion_csv(s);
}

std::string to_csv(const PLPath& p) {
  std::ostringstream o;
  o.precision(17);
  o << "t,h\n";
  for (std::size_t i = 0; i < p.size(); ++i) o << p.t[i] << ',' << p.h[i] << '\n';
  return o.str();
}

}  // namespace levytree
