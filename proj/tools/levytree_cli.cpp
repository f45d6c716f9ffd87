// levytree: curves, coefficients, moments, consistency checks and simulations.
// Exit codes: 0 success, 2 usage, 3 tolerance breach, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levytree/branching.hpp"
#include "levytree/coeffs.hpp"
#include "levytree/common.hpp"
#include "levytree/consistency.hpp"
#include "levytree/laws.hpp"
#include "levytree/simulate.hpp"
#include "levytree/stablefn.hpp"

using namespace levytree;
using json = nlohmann::ordered_json;

namespace {

constexpr int kUsage = 2, kBreach = 3, kNumerical = 4;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_grid(const std::string& spec, const std::string& spacing) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw Usage("");
    } catch (...) {
      throw Usage("grid '" + spec + "': expected min:max:count");
    }
  }
  if (parts.size() != 3) throw Usage("grid '" + spec + "': expected min:max:count");
  const double a = parts[0], b = parts[1];
  const int n = static_cast<int>(parts[2]);
  if (n < 2 || parts[2] != n) throw Usage("grid '" + spec + "': count must be an integer >= 2");
  if (!(b > a)) throw Usage("grid '" + spec + "': max must exceed min");
  std::vector<double> g(n);
  if (spacing == "log") {
    if (!(a > 0)) throw Usage("grid '" + spec + "': log spacing needs min > 0");
    for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  } else {
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  }
  g.back() = b;
  return g;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// stdout unless a path is given
struct Out {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Out(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw Usage("cannot open output file " + path);
    os = &file;
  }
  std::ostream& operator()() { return *os; }
};

std::string provenance(const std::string& sub, double gamma, const TailConfig& cfg) {
  std::ostringstream o;
  o << "# levytree " << kVersion << " " << sub << " gamma=" << num(gamma) << " accuracy=" << short_num(cfg.accuracy)
    << " term_tol=" << short_num(cfg.term_tol) << " term_rel_err=" << short_num(cfg.term_rel_err)
    << " quad_rel_tol=" << short_num(cfg.quad.rel_tol);
  return o.str();
}

std::vector<double> trimmed(const std::vector<double>& v, std::size_t from) {
  return from < v.size() ? std::vector<double>(v.begin() + static_cast<long>(from), v.end()) : std::vector<double>{};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Height and diameter laws of stable Levy trees"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  double gamma = 2;
  std::string grid, spacing = "linear", out_path, kind;
  TailConfig tcfg;
  bool strict = false, quick = false, check_structure = false;
  double z = 0, r = 1, lambda = 1;
  int terms = 25, n = 10000, M = 100000, threads = 0;
  std::uint64_t seed = 1;
  std::string gamma_grid, replicas_csv;

  auto add_gamma = [&](CLI::App* s) { s->add_option("--gamma", gamma, "stable index in (1, 2]")->default_val(2.0); };
  auto add_grid = [&](CLI::App* s, const char* what) {
    s->add_option("--grid", grid, std::string(what) + " grid min:max:count")->required();
    s->add_option("--spacing", spacing, "linear or log")->check(CLI::IsMember({"linear", "log"}));
  };
  auto add_tol = [&](CLI::App* s) {
    s->add_option("--accuracy", tcfg.accuracy, "refuse tail series above this error estimate");
    s->add_option("--term-tol", tcfg.term_tol, "series truncation threshold");
    s->add_option("--quad-rel-tol", tcfg.quad.rel_tol, "quadrature relative tolerance");
  };
  auto add_out = [&](CLI::App* s) { s->add_option("-o,--out", out_path, "output file (default stdout)"); };

  auto* tail = app.add_subcommand("tail", "N_nr(Gamma > r) or N_nr(D > r) over a grid (CSV)");
  add_gamma(tail);
  add_grid(tail, "r");
  add_tol(tail);
  add_out(tail);
  tail->add_option("--kind", kind, "height or diam")->required()->check(CLI::IsMember({"height", "diam"}));
  tail->add_flag("--strict", strict, "exit 4 instead of writing the small-r asymptote where the series is refused");

  auto* density = app.add_subcommand("density", "diameter density under N, or the stable density s_gamma (CSV)");
  add_gamma(density);
  add_grid(density, "x");
  add_out(density);
  density->add_option("--kind", kind, "diam or stable")->default_val("diam")->check(CLI::IsMember({"diam", "stable"}));

  auto* cond = app.add_subcommand("conditional", "N(D <= y | Gamma = r) over a y grid (CSV)");
  add_gamma(cond);
  add_grid(cond, "y");
  add_out(cond);
  cond->add_option("--r", r, "height")->required();

  auto* joint = app.add_subcommand("joint", "joint Laplace law L_lambda(y, z) over a y grid (CSV)");
  add_gamma(joint);
  add_grid(joint, "y");
  add_out(joint);
  joint->add_option("--z", z, "second argument")->default_val(0.0);
  joint->add_option("--lambda", lambda, "mass parameter")->default_val(1.0);

  auto* mom = app.add_subcommand("moments", "N_nr[Gamma], N_nr[D] and their ratio over a gamma grid (CSV)");
  mom->add_option("--gamma-grid", gamma_grid, "min:max:count")->required();
  add_out(mom);

  auto* co = app.add_subcommand("coeffs", "coefficient tables and constants (JSON)");
  add_gamma(co);
  add_out(co);
  co->add_option("--terms", terms, "number of coefficients")->default_val(25)->check(CLI::Range(2, 200));

  auto* cons = app.add_subcommand("consistency", "dual-route checks; exit 3 on any breach (JSON)");
  cons->add_option("--gamma", gamma, "stable index")->default_val(2.0);
  cons->add_option("--gamma-grid", gamma_grid, "run at every gamma of min:max:count instead");
  cons->add_flag("--quick", quick, "skip the Laplace cross-check of the tail series");
  add_out(cons);

  auto* t1 = app.add_subcommand("table1", "large- and small-r exponents with the small-r constants (JSON)");
  add_gamma(t1);
  add_grid(t1, "r");
  add_out(t1);

  auto* sim = app.add_subcommand("simulate", "conditioned Galton-Watson trees against the analytic laws (JSON)");
  add_gamma(sim);
  add_out(sim);
  sim->add_option("--n", n, "tree size")->default_val(10000)->check(CLI::Range(2, 100000));  // sampler setup grows like n^2 log n
  sim->add_option("--M", M, "replicas")->default_val(100000)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "seed")->default_val(1);
  sim->add_option("--threads", threads, "worker count (default: LEVYTREE_THREADS or hardware)");
  sim->add_option("--replicas-csv", replicas_csv, "write replica,gamma_disc,d_disc here");
  sim->add_flag("--check-structure", check_structure, "run the per-tree diameter endpoint and midpoint checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (!*mom) check_gamma(gamma);
    Out out(out_path);

    if (*tail) {
      const auto g = parse_grid(grid, spacing);
      out() << provenance("tail --kind " + kind, gamma, tcfg) << "\n";
      out() << "r,tail,cdf,error,terms,method\n";
      for (double x : g) {
        TailValue t;
        double cdf = 0;
        try {
          t = kind == "height" ? nr_height_tail_eval(x, gamma, tcfg) : nr_diam_tail_eval(x, gamma, tcfg);
          cdf = 1 - t.value;
          // the small-r form is the accurate side here
          if (t.method == "brownian_cdf") cdf = kind == "height" ? brownian_height_cdf(x) : brownian_diam_cdf(x);
        } catch (const UnsupportedError&) {
          if (strict) throw;
          cdf = std::min(1.0, kind == "height" ? height_cdf_asymptote(x, gamma) : diam_cdf_asymptote(x, gamma));
          t.value = 1 - cdf;
          t.error = std::numeric_limits<double>::quiet_NaN();
          t.method = "asymptote";
        }
        out() << num(x) << "," << num(t.value) << "," << num(cdf) << "," << num(t.error) << "," << t.terms << ","
              << t.method << "\n";
      }
    } else if (*density) {
      const auto g = parse_grid(grid, spacing);
      out() << provenance("density --kind " + kind, gamma, tcfg) << "\n";
      out() << (kind == "diam" ? "x,density_N\n" : "x,s_gamma\n");
      for (double x : g) out() << num(x) << "," << num(kind == "diam" ? diam_density(x, gamma) : s_gamma(x, gamma)) << "\n";
    } else if (*cond) {
      const auto g = parse_grid(grid, spacing);
      out() << provenance("conditional r=" + num(r), gamma, tcfg) << "\n";
      out() << "y,r,cdf\n";
      for (double y : g) out() << num(y) << "," << num(r) << "," << num(cond_diam_given_height(y, r, gamma)) << "\n";
    } else if (*joint) {
      const auto g = parse_grid(grid, spacing);
      out() << provenance("joint z=" + num(z) + " lambda=" + num(lambda), gamma, tcfg) << "\n";
      out() << "y,z,lambda,L\n";
      for (double y : g)
        out() << num(y) << "," << num(z) << "," << num(lambda) << "," << num(L_lambda(y, z, lambda, gamma)) << "\n";
    } else if (*mom) {
      const auto gs = parse_grid(gamma_grid, "linear");
      for (double x : gs) check_gamma(x);
      out() << "# levytree " << kVersion << " moments gamma_grid=" << gamma_grid << " quadrature=tanh_sinh,gauss_kronrod61\n";
      out() << "gamma,mean_height,mean_diam,ratio,mean_height_series,mean_diam_series\n";
      for (double x : gs) {
        const auto m = moments(x);
        out() << num(x) << "," << num(m.mean_height) << "," << num(m.mean_diam) << "," << num(m.ratio) << ","
              << num(m.mean_height_series) << "," << num(m.mean_diam_series) << "\n";
      }
    } else if (*co) {
      const auto t = coeff_tables(gamma, terms);
      json j;
      j["gamma"] = gamma;
      j["version"] = kVersion;
      j["S"] = t.S;
      j["T"] = t.T;
      j["V"] = t.V;
      j["U"] = t.U;
      j["beta"] = trimmed(t.beta, 1);
      j["beta_first_index"] = 1;
      j["gamma_n"] = trimmed(t.gamma_n, 2);
      j["delta_n"] = trimmed(t.delta_n, 2);
      j["gamma_delta_first_index"] = 2;
      j["C0"] = t.k.C0;
      j["C1"] = t.k.C1;
      j["C2"] = t.k.C2;
      j["lambda_cr"] = t.k.lambda_cr;
      j["C_small"] = jnum(t.k.C_small);
      j["Cprime_small"] = jnum(t.k.Cprime_small);
      out() << j.dump(2) << "\n";
    } else if (*cons) {
      std::vector<double> gs{gamma};
      if (!gamma_grid.empty()) gs = parse_grid(gamma_grid, "linear");
      json j;
      j["version"] = kVersion;
      j["quick"] = quick;
      json checks = json::array(), failures = json::array();
      for (double x : gs) {
        check_gamma(x);
        for (const auto& c : consistency_suite(x, quick)) {
          json e{{"gamma", x},         {"name", c.name}, {"value", jnum(c.value)}, {"reference", jnum(c.reference)},
                 {"error", jnum(c.error)}, {"tol", c.tol},   {"pass", c.pass}};
          checks.push_back(e);
          if (!c.pass) failures.push_back(e);
        }
      }
      j["checks"] = checks;
      j["failures"] = failures;
      out() << j.dump(2) << "\n";
      if (!failures.empty()) return kBreach;
    } else if (*t1) {
      const auto g = parse_grid(grid, spacing);
      const auto rep = table1_report(gamma, g);
      json j;
      j["gamma"] = gamma;
      j["version"] = kVersion;
      j["lambda_cr"] = rep.lambda_cr;
      j["C_small"] = jnum(rep.C_small);
      j["Cprime_small"] = jnum(rep.Cprime_small);
      j["brownian_height_prefactor"] = rep.brownian_height_prefactor;
      j["brownian_diam_prefactor"] = rep.brownian_diam_prefactor;
      json rows = json::array();
      for (const auto& row : rep.rows)
        rows.push_back({{"r", row.r},
                        {"height_large", jnum(row.height_large)},
                        {"diam_large", jnum(row.diam_large)},
                        {"height_small", jnum(row.height_small)},
                        {"diam_small", jnum(row.diam_small)}});
      j["rows"] = rows;
      out() << j.dump(2) << "\n";
    } else if (*sim) {
      SimConfig sc;
      sc.threads = threads;
      sc.check_structure = check_structure;
      const auto rep = run_experiment(gamma, n, M, seed, sc);
      json j;
      j["gamma"] = rep.gamma;
      j["n"] = rep.n;
      j["M"] = rep.M;
      j["seed"] = rep.seed;
      j["law"] = rep.law;
      j["version"] = kVersion;
      j["kappa"] = rep.kappa;
      j["mean_height"] = rep.mean_height;
      j["mean_diam"] = rep.mean_diam;
      j["ratio"] = rep.ratio;
      j["analytic_mean_height"] = rep.analytic_mean_height;
      j["analytic_mean_diam"] = rep.analytic_mean_diam;
      j["analytic_ratio"] = rep.analytic_ratio;
      j["ks_height"] = rep.ks_height;
      j["ks_diam"] = rep.ks_diam;
      j["ks_asymptote_points"] = rep.ks_asymptote_points;
      if (rep.structure_checked)
        j["structure"] = {{"trees", rep.structure.trees},
                          {"bound_violations", rep.structure.bound_violations},
                          {"endpoint_violations", rep.structure.endpoint_violations},
                          {"midpoint_violations", rep.structure.midpoint_violations},
                          {"trees_with_several_diameter_pairs", rep.structure.diameter_pairs_checked}};
      out() << j.dump(2) << "\n";
      if (!replicas_csv.empty()) {
        std::ofstream f(replicas_csv);
        if (!f) throw Usage("cannot open " + replicas_csv);
        f << "# levytree " << kVersion << " simulate gamma=" << num(gamma) << " n=" << n << " M=" << M
          << " seed=" << seed << " law=" << rep.law << "\n";
        f << "replica,gamma_disc,d_disc\n";
        for (int i = 0; i < M; ++i) f << i << "," << rep.heights[i] << "," << rep.diams[i] << "\n";
      }
    }
  } catch (const Usage& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return 0;
}
