#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hgc/acceptance.hpp"
#include "hgc/coupling.hpp"
#include "hgc/error.hpp"
#include "hgc/harness.hpp"
#include "hgc/measure.hpp"
#include "hgc/theory.hpp"

namespace hgc::cli {

namespace {

/// Raw flag values shared by the experiment subcommands.
struct Flags {
  std::vector<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<std::size_t> trials;
  std::uint64_t seed = 0;
  std::string coupling = "plain-gs";
  std::string out;
  std::optional<std::string> format;
  std::size_t workers = 1;
  bool deterministic = false;
  std::string config;
  std::string kind = "row-norms";
};

struct BoundsFlags {
  std::optional<double> t;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::size_t> k;
  std::optional<double> eps;
  std::optional<double> rho;
  std::optional<double> alpha;
  std::optional<double> beta;
  double slack = 0.0;
  std::vector<double> widths;
  std::optional<double> a;
  bool check = false;
  std::uint64_t seed = 0;
  std::string out;
  std::optional<std::string> format;
};

std::size_t default_workers() {
  if (const char* env = std::getenv("HGC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

OutputFormat infer_format(const std::optional<std::string>& format, const std::string& out) {
  if (format) return parse_output_format(*format);
  auto ends_with = [&](const char* ext) {
    const std::string e(ext);
    return out.size() >= e.size() && out.compare(out.size() - e.size(), e.size(), e) == 0;
  };
  if (ends_with(".json")) return OutputFormat::json;
  if (ends_with(".svg")) return OutputFormat::svg;
  return OutputFormat::csv;
}

void add_size_flags(CLI::App* sub, Flags& f, bool sized) {
  if (!sized) return;
  auto* m = sub->add_option("--m", f.m, "Block width m (number of leading columns)");
  auto* alpha = sub->add_option("--alpha", f.alpha, "Block width as m = floor(alpha n), alpha in (0, 1]");
  auto* beta = sub->add_option("--beta", f.beta, "Block width as m = floor(beta n / ln n)");
  m->excludes(alpha)->excludes(beta);
  alpha->excludes(beta);
}

void add_run_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--trials", f.trials, "Number of independent trials");
  sub->add_option("--seed", f.seed, "Root seed (default 0)");
  sub->add_option("--out", f.out, "Output path");
  sub->add_option("--format", f.format, "Output format: csv, json or svg (default from --out extension)");
  sub->add_option("--workers", f.workers, "Worker threads (default $HGC_WORKERS or 1)");
  sub->add_flag("--deterministic", f.deterministic, "Zero wall-time fields for byte-reproducible output");
  sub->add_option("--config", f.config, "JSON experiment config; flags given on the command line override it");
}

ExperimentConfig build_config(ExperimentKind kind, const Flags& f, const CLI::App& sub) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw IoError(f.config, "cannot open config");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(f.config + ": " + e.what());
    }
    c = config_from_json(j);
    if (c.kind != kind) {
      throw ConfigError("config kind '" + std::string(to_string(c.kind)) +
                        "' does not match subcommand (" + std::string(to_string(kind)) + ")");
    }
  }
  c.kind = kind;
  auto given = [&](const char* name) { return sub.get_option_no_throw(name) && sub.count(name) > 0; };
  if (given("--n")) c.n = f.n.front();
  if (given("--m") || given("--alpha") || given("--beta")) {
    c.m = f.m;
    c.alpha = f.alpha;
    c.beta = f.beta;
  }
  if (given("--seed")) c.seed = f.seed;
  if (given("--coupling")) c.coupling = parse_coupling_kind(f.coupling);
  if (given("--out")) c.out = f.out;
  if (given("--workers")) {
    c.workers = f.workers;
  } else if (f.config.empty()) {
    c.workers = default_workers();
  }
  if (given("--format") || given("--out")) c.format = infer_format(f.format, c.out);
  if (given("--trials")) {
    c.trials = *f.trials;
  } else if (f.config.empty()) {
    c.trials = default_trials(kind, c.n);
  }
  c.deterministic = f.deterministic;
  if (c.n == 0 && kind != ExperimentKind::bounds_check) throw ConfigError("--n is required");
  return c;
}

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void print_summary(const Report& r, std::ostream& out) {
  const ExperimentConfig& c = r.config;
  out << to_string(c.kind) << ": n=" << c.n;
  if (c.kind == ExperimentKind::borel) {
    out << ", " << r.trials.size() << " trials. sqrt(n) u_11 has mean "
        << num(r.aggregate.at("borel_sample").mean) << " and std "
        << num(r.aggregate.at("borel_sample").std) << "; Kolmogorov-Smirnov distance to N(0,1) is "
        << num(*r.ks) << " (1% critical value " << num(1.63 / std::sqrt(double(r.trials.size())))
        << ").\n";
    return;
  }
  out << " m=" << r.m << " (alpha=" << num(r.alpha);
  if (c.beta) out << ", beta=" << num(*c.beta);
  out << "), " << r.trials.size() << " trials, coupling " << to_string(c.coupling) << ". "
      << "Median sup_i ||F_i^m|| = " << num(r.aggregate.at("sup_F").q50)
      << ", median inf_i = " << num(r.aggregate.at("inf_F").q50)
      << " against sqrt(phi(alpha) m) = " << num(r.envelope.row_norm_target)
      << " (phi = " << num(r.envelope.phi) << "); median ratios sup " << num(r.aggregate.at("ratio_sup").q50)
      << ", inf " << num(r.aggregate.at("ratio_inf").q50) << ", flatness (sup-inf)/mean "
      << num(r.aggregate.at("flatness").q50) << ".";
  if (auto it = r.aggregate.find("eps"); it != r.aggregate.end()) {
    out << " Median eps_n(m) = " << num(it->second.q50);
    if (auto jt = r.aggregate.find("eps_randomized"); jt != r.aggregate.end()) {
      std::size_t wins = 0;
      for (const auto& t : r.trials) wins += t.eps_paired->eps < t.eps->eps;
      out << " (plain-gs) vs " << num(jt->second.q50) << " (randomized), randomized smaller in "
          << wins << "/" << r.trials.size() << " trials";
    }
    out << "; leading-order envelope [" << num(r.envelope.eps_lower) << ", "
        << num(r.envelope.eps_upper) << "]";
    if (c.beta) {
      const theory::Interval b = theory::beta_interval(*c.beta);
      out << ", limit window (" << num(b.lower) << ", " << num(b.upper) << ")";
    }
    out << ".";
  }
  if (auto it = r.aggregate.find("g2_over_m"); it != r.aggregate.end()) {
    out << " Mean ||G_i||^2/m = " << num(it->second.q50) << " (alpha/2 = " << num(r.alpha / 2)
        << "), mean ||H_i||^2/m = " << num(r.aggregate.at("h2_over_m").q50)
        << " (phi - alpha/2 = " << num(r.envelope.phi - r.alpha / 2)
        << "), max |<G_i,H_i>|/m = " << num(r.aggregate.at("max_cross_over_m").q50) << ".";
  }
  out << "\n";
}

void print_checks(const std::vector<BoundCheck>& checks, std::ostream& out) {
  for (const BoundCheck& b : checks) {
    out << (b.holds ? "ok   " : "FAIL ") << b.name << " (" << b.parameters << "): empirical "
        << num(b.empirical) << " over " << b.samples << " samples, bound ";
    if (b.lower_bound) out << num(*b.lower_bound) << " <= . <= ";
    out << num(b.bound) << "\n";
  }
}

int run_couple(const Flags& f, std::ostream& out) {
  if (f.n.empty()) throw ConfigError("--n is required");
  const std::size_t n = f.n.front();
  const CoupledPair pair = gram_schmidt_couple(sample_gaussian(n, n, Seed(f.seed, {0, 0})));
  const CouplingCheck check = check_coupling(pair);
  const Summary r = summarize(pair.residual_norms);
  out << "couple: n=" << n << ", seed " << f.seed << ". max|UᵀU - I| = " << num(check.orthogonality, 3)
      << ", max relative reconstruction error " << num(check.reconstruction, 3)
      << "; residual norms r_j range [" << num(r.inf) << ", " << num(r.sup) << "] (r_1 = "
      << num(pair.residual_norms.front()) << ", sqrt(n) = " << num(std::sqrt(double(n))) << ").\n";
  if (check.orthogonality > 1e-10 || check.reconstruction > 1e-10) {
    throw NumericalError("coupling failed its orthogonality/reconstruction check");
  }
  if (!f.out.empty()) {
    const OutputFormat format = infer_format(f.format, f.out);
    std::ostringstream os;
    if (format == OutputFormat::json) {
      nlohmann::json j;
      j["n"] = n;
      j["seed"] = f.seed;
      nlohmann::json y = nlohmann::json::array(), u = nlohmann::json::array();
      for (std::size_t i = 0; i < n; ++i) {
        nlohmann::json yr = nlohmann::json::array(), ur = nlohmann::json::array();
        for (std::size_t jj = 0; jj < n; ++jj) {
          yr.push_back(pair.y(i, jj));
          ur.push_back(pair.u(i, jj));
        }
        y.push_back(yr);
        u.push_back(ur);
      }
      j["y"] = y;
      j["u"] = u;
      j["residual_norms"] = pair.residual_norms;
      os << j.dump(2) << "\n";
    } else if (format == OutputFormat::csv) {
      os << "i,j,y,u\n";
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t jj = 0; jj < n; ++jj) {
          os << i + 1 << ',' << jj + 1 << ',' << format_double(pair.y(i, jj)) << ','
             << format_double(pair.u(i, jj)) << '\n';
        }
      }
    } else {
      throw ConfigError("couple writes csv or json");
    }
    std::ofstream file(f.out, std::ios::binary | std::ios::trunc);
    if (!file || !(file << os.str()) || !file.flush()) throw IoError(f.out, "cannot write");
  }
  return kOk;
}

int run_bounds(const BoundsFlags& b, std::ostream& out) {
  using namespace theory;
  bool printed = false;
  if (b.t) {
    const Interval g = gaussian_tail_bounds(*b.t);
    out << "Gaussian tail: " << std::fixed << std::setprecision(6) << g.lower << " <= P(Z > "
        << std::defaultfloat << *b.t << ") <= " << std::fixed << g.upper << std::defaultfloat << "\n";
    printed = true;
  }
  if (b.n && b.eps) {
    out << "Gaussian vector norm (n=" << *b.n << ", eps=" << *b.eps
        << "): each deviation probability <= " << num(chi_norm_tail(*b.n, *b.eps)) << "\n";
    printed = true;
  }
  if (b.k) {
    if (!b.n || !b.rho) throw ConfigError("--k needs --n and --rho");
    std::optional<double> far;
    if (b.t && *b.t > 1.0) far = b.t;
    const ProjectionTails p = projection_tails(*b.k, *b.n, *b.rho, far);
    out << "Haar " << *b.k << "-subspace of R^" << *b.n << " (rho=" << *b.rho
        << "): Gaussian projection tails <= " << num(p.gaussian_above) << " each; unit-vector tails <= "
        << num(p.unit_above) << " each";
    if (p.unit_far) out << "; P(||P_L y|| >= " << *far << " sqrt(k/n)) <= " << num(*p.unit_far);
    out << "\n";
    printed = true;
  }
  if (b.alpha) {
    out << "phi(" << *b.alpha << ") = " << num(phi(*b.alpha), 12) << "\n";
    printed = true;
  }
  if (b.n && b.m) {
    const Interval e = epsilon_envelope(*b.n, *b.m, b.slack);
    const Interval s = sphere_sup_threshold(*b.n, *b.m, b.slack);
    out << "n=" << *b.n << ", m=" << *b.m << ": sqrt(phi(m/n) m) = " << num(predicted_row_norm(*b.n, *b.m))
        << " (m/sqrt(2n) = " << num(double(*b.m) / std::sqrt(2.0 * double(*b.n)))
        << "); eps_n(m) leading-order envelope [" << num(e.lower) << ", " << num(e.upper)
        << "] at slack " << b.slack << "; unit-sphere sup thresholds [" << num(s.lower) << ", "
        << num(s.upper) << "]\n";
    printed = true;
  }
  if (b.beta) {
    const Interval w = beta_interval(*b.beta);
    out << "beta=" << *b.beta << ": eps_n(m) window (" << num(w.lower) << ", " << num(w.upper) << ")";
    if (b.n && *b.n >= 2) {
      out << ", m = floor(beta n / ln n) = "
          << static_cast<long long>(std::floor(*b.beta * double(*b.n) / std::log(double(*b.n))));
    }
    out << "\n";
    printed = true;
  }
  if (!b.widths.empty() || b.a) {
    if (b.widths.empty() || !b.a) throw ConfigError("--widths and --a go together");
    out << "Hoeffding: P(|S - E S| > " << *b.a << ") <= " << num(hoeffding_bound(b.widths, *b.a)) << "\n";
    printed = true;
  }
  if (b.check) {
    ExperimentConfig c;
    c.kind = ExperimentKind::bounds_check;
    c.seed = b.seed;
    c.out = b.out;
    c.format = infer_format(b.format, b.out);
    const Report r = hgc::run(c);
    print_checks(r.checks, out);
    const bool ok = std::all_of(r.checks.begin(), r.checks.end(), [](const BoundCheck& x) { return x.holds; });
    if (!ok) throw NumericalError("a Monte Carlo frequency exceeded its analytic bound");
    printed = true;
  }
  if (!printed) throw ConfigError("bounds: nothing to compute; see --help");
  return kOk;
}

int run_sweep(const Flags& f, const CLI::App& sub, std::ostream& out) {
  if (f.n.empty()) throw ConfigError("--n is required (comma-separated list)");
  const ExperimentKind kind = parse_experiment_kind(f.kind);
  std::vector<ExperimentConfig> grid;
  for (std::size_t n : f.n) {
    Flags cell = f;
    cell.n = {n};
    cell.out.clear();
    ExperimentConfig c = build_config(kind, cell, sub);
    c.n = n;
    c.out.clear();
    if (!sub.count("--trials")) c.trials = default_trials(kind, n);
    grid.push_back(c);
  }
  const SweepTable table = sweep(grid);
  for (const SweepRow& row : table.rows) {
    if (row.report) {
      print_summary(*row.report, out);
    } else {
      out << "error: " << row.error << "\n";
    }
  }
  if (!f.out.empty()) emit(table, infer_format(f.format, f.out), f.out);
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian / Haar-orthogonal coupling experiments", "hgc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Flags f;
  BoundsFlags b;
  f.workers = default_workers();

  struct Sub {
    const char* name;
    const char* help;
    ExperimentKind kind;
    bool sized;
  };
  const Sub experiment_subs[] = {
      {"rownorms", "Truncated row norms of Y - sqrt(n) U against sqrt(phi(alpha) m)", ExperimentKind::row_norms, true},
      {"gh", "Split F = G + H: projection and residual-rescaling parts, cross terms", ExperimentKind::gh_split, true},
      {"epsilon", "Sup-norm eps_n(m) of the n x m block against its envelope", ExperimentKind::epsilon, true},
      {"compare", "Paired eps_n(m): plain Gram-Schmidt vs randomized coupling on the same Y, U", ExperimentKind::coupling_compare, true},
      {"borel", "KS test of sqrt(n) u_11 against N(0, 1)", ExperimentKind::borel, false},
  };

  std::vector<std::pair<CLI::App*, ExperimentKind>> experiments;
  for (const Sub& s : experiment_subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--n", f.n, "Matrix dimension n")->expected(1);
    add_size_flags(sub, f, s.sized);
    if (s.kind == ExperimentKind::epsilon) {
      sub->add_option("--coupling", f.coupling, "plain-gs or randomized (default plain-gs)");
    }
    add_run_flags(sub, f);
    experiments.emplace_back(sub, s.kind);
  }

  CLI::App* couple = app.add_subcommand("couple", "Couple one Gaussian matrix with its Gram-Schmidt orthonormalization");
  couple->add_option("--n", f.n, "Matrix dimension n")->expected(1)->required();
  couple->add_option("--seed", f.seed, "Root seed (default 0)");
  couple->add_option("--out", f.out, "Write (i, j, y_ij, u_ij) as csv or json");
  couple->add_option("--format", f.format, "csv or json (default from --out extension)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one experiment kind over a list of n");
  sweep_cmd->add_option("--n", f.n, "Comma-separated dimensions")->delimiter(',');
  sweep_cmd->add_option("--kind", f.kind, "Experiment kind per cell (default row-norms)");
  sweep_cmd->add_option("--coupling", f.coupling, "plain-gs or randomized (default plain-gs)");
  add_size_flags(sweep_cmd, f, true);
  add_run_flags(sweep_cmd, f);

  CLI::App* bounds = app.add_subcommand("bounds", "Analytic bound calculators and Monte Carlo dominance checks");
  bounds->add_option("--t", b.t, "Gaussian tail point t > 0 (and far-tail t > 1 with --k)");
  bounds->add_option("--n", b.n, "Ambient dimension n");
  bounds->add_option("--m", b.m, "Block width m");
  bounds->add_option("--k", b.k, "Subspace dimension k");
  bounds->add_option("--eps", b.eps, "Relative deviation eps in (0, 1)");
  bounds->add_option("--rho", b.rho, "Relative deviation rho in (0, 1)");
  bounds->add_option("--alpha", b.alpha, "Evaluate phi(alpha)");
  bounds->add_option("--beta", b.beta, "Limit window for m = floor(beta n / ln n)");
  bounds->add_option("--slack", b.slack, "Multiplicative slack for the envelopes (default 0)");
  bounds->add_option("--widths", b.widths, "Hoeffding range widths b_i - a_i")->delimiter(',');
  bounds->add_option("--a", b.a, "Hoeffding deviation a > 0");
  bounds->add_flag("--check", b.check, "Run the Monte Carlo bound-dominance checks");
  bounds->add_option("--seed", b.seed, "Root seed for --check");
  bounds->add_option("--out", b.out, "Write the --check report");
  bounds->add_option("--format", b.format, "csv, json or svg (default from --out extension)");

  CLI::App* selftest = app.add_subcommand("selftest", "Run the acceptance suite at reduced scale (n <= 512)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help("", CLI::AppFormatMode::All) : subs.front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kUsage;
  }

  for (const auto& [sub, kind] : experiments) {
    if (!sub->parsed()) continue;
    const Report r = hgc::run(build_config(kind, f, *sub));
    print_summary(r, out);
    return kOk;
  }
  if (couple->parsed()) return run_couple(f, out);
  if (sweep_cmd->parsed()) return run_sweep(f, *sweep_cmd, out);
  if (bounds->parsed()) return run_bounds(b, out);
  if (selftest->parsed()) {
    const auto results = acceptance::run_all(acceptance::Scale::reduced, out);
    const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
    out << (ok ? "selftest passed\n" : "selftest FAILED\n");
    return ok ? kOk : kNumerical;
  }
  err << app.help("", CLI::AppFormatMode::All);
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace hgc::cli
