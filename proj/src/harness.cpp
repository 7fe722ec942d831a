#include "hgc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "hgc/coupling.hpp"
#include "hgc/error.hpp"

namespace hgc {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::row_norms, "row-norms"},
    {ExperimentKind::gh_split, "gh-split"},
    {ExperimentKind::epsilon, "epsilon"},
    {ExperimentKind::coupling_compare, "coupling-compare"},
    {ExperimentKind::borel, "borel"},
    {ExperimentKind::bounds_check, "bounds-check"},
    {ExperimentKind::sweep, "sweep"},
};

bool needs_block(ExperimentKind kind) {
  return kind != ExperimentKind::borel && kind != ExperimentKind::bounds_check;
}

double mean_of_squares(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

TrialResult run_trial(const ExperimentConfig& config, std::size_t m, std::size_t t) {
  const auto start = std::chrono::steady_clock::now();
  const Seed trial_seed(config.seed, {t});

  TrialResult r;
  r.trial = t;
  r.seed = trial_seed.key();

  // Only the leading columns enter any statistic, and column j of U depends
  // on y_1..y_j only, so the n x m prefix is coupled instead of the full Y.
  const std::size_t width = config.kind == ExperimentKind::borel ? 1 : m;
  Matrix y = sample_gaussian(config.n, width, trial_seed.child(0));
  if (config.perturb_gaussian) config.perturb_gaussian(y, t);

  CoupledPair pair = [&] {
    try {
      return gram_schmidt_couple_columns(y);
    } catch (const DegeneracyError& e) {
      throw NumericalError("trial " + std::to_string(t) + ": " + e.what());
    }
  }();

  if (config.kind == ExperimentKind::borel) {
    r.borel_sample = std::sqrt(static_cast<double>(config.n)) * pair.u(0, 0);
  } else {
    const std::vector<double> norms = truncated_row_norms(pair.y, pair.u, m);
    const auto [lo, hi] = std::minmax_element(norms.begin(), norms.end());
    r.inf_F = *lo;
    r.sup_F = *hi;
    double total = 0.0;
    for (double v : norms) total += v;
    r.mean_F = total / static_cast<double>(norms.size());
    r.predicted = theory::predicted_row_norm(config.n, m);
    r.ratio_sup = r.sup_F / r.predicted;
    r.ratio_inf = r.inf_F / r.predicted;
  }

  switch (config.kind) {
    case ExperimentKind::gh_split: {
      const RowBlockDecomposition d = decompose_gh(pair, m);
      const double md = static_cast<double>(m);
      double max_cross = 0.0;
      for (double c : d.cross) max_cross = std::max(max_cross, std::abs(c));
      r.gh = GhStats{mean_of_squares(d.g_norms) / md, mean_of_squares(d.h_norms) / md,
                     max_cross / md};
      break;
    }
    case ExperimentKind::epsilon:
      if (config.coupling == CouplingKind::randomized) {
        const RotatedPair rot = randomized_couple(pair, m, trial_seed.child(1));
        r.eps = epsilon_sup(rot.y, rot.u, m, CouplingKind::randomized, config.beta);
      } else {
        r.eps = epsilon_sup(pair.y, pair.u, m, CouplingKind::plain_gs, config.beta);
      }
      break;
    case ExperimentKind::coupling_compare: {
      r.eps = epsilon_sup(pair.y, pair.u, m, CouplingKind::plain_gs, config.beta);
      const RotatedPair rot = randomized_couple(pair, m, trial_seed.child(1));
      r.eps_paired = epsilon_sup(rot.y, rot.u, m, CouplingKind::randomized, config.beta);
      break;
    }
    default:
      break;
  }

  if (!config.deterministic) {
    r.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  }
  return r;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config, std::size_t m) {
  std::vector<std::optional<TrialResult>> slots(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        slots[t] = run_trial(config, m, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(config.workers, 1, config.trials);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Lowest failing trial index wins, whatever the completion order.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<TrialResult> out;
  out.reserve(config.trials);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

void aggregate(Report& report) {
  std::map<std::string, std::vector<double>> columns;
  for (const TrialResult& r : report.trials) {
    if (r.borel_sample) {
      columns["borel_sample"].push_back(*r.borel_sample);
      continue;
    }
    columns["sup_F"].push_back(r.sup_F);
    columns["inf_F"].push_back(r.inf_F);
    columns["mean_F"].push_back(r.mean_F);
    columns["ratio_sup"].push_back(r.ratio_sup);
    columns["ratio_inf"].push_back(r.ratio_inf);
    columns["flatness"].push_back(r.flatness());
    if (r.eps) columns["eps"].push_back(r.eps->eps);
    if (r.eps_paired) columns["eps_randomized"].push_back(r.eps_paired->eps);
    if (r.gh) {
      columns["g2_over_m"].push_back(r.gh->g2_over_m);
      columns["h2_over_m"].push_back(r.gh->h2_over_m);
      columns["max_cross_over_m"].push_back(r.gh->max_cross_over_m);
    }
  }
  for (const auto& [name, values] : columns) report.aggregate[name] = summarize(values);
  if (auto it = columns.find("borel_sample"); it != columns.end()) {
    report.ks = ks_statistic(it->second);
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::csv:
      return "csv";
    case OutputFormat::json:
      return "json";
    case OutputFormat::svg:
      return "svg";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (const auto& [k, label] : kKindNames) {
    if (label == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "svg") return OutputFormat::svg;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

std::size_t resolve_m(const ExperimentConfig& config) {
  if (config.trials == 0) throw ConfigError("trials must be at least 1");
  if (config.kind == ExperimentKind::sweep) {
    throw ConfigError("sweep is a grid of configs, not a single experiment");
  }
  const int specs = int{config.m.has_value()} + int{config.alpha.has_value()} +
                    int{config.beta.has_value()};
  if (specs > 1) throw ConfigError("give exactly one of m, alpha, beta");
  if (config.kind == ExperimentKind::bounds_check) return 1;
  if (config.n == 0) throw ConfigError("n must be at least 1");
  if (!needs_block(config.kind)) {
    if (specs != 0) throw ConfigError(std::string(to_string(config.kind)) + " takes no size");
    return 1;
  }
  if (specs == 0) throw ConfigError("one of m, alpha, beta is required");

  const double n = static_cast<double>(config.n);
  double m = 0.0;
  if (config.m) {
    m = static_cast<double>(*config.m);
  } else if (config.alpha) {
    if (!(*config.alpha > 0.0 && *config.alpha <= 1.0)) {
      throw ConfigError("alpha must lie in (0, 1]");
    }
    m = std::floor(*config.alpha * n);
  } else {
    if (!(*config.beta > 0.0)) throw ConfigError("beta must be positive");
    if (config.n < 2) throw ConfigError("beta sizing needs n >= 2");
    m = std::floor(*config.beta * n / std::log(n));
  }
  if (!(m >= 1.0 && m <= n)) {
    throw ConfigError("resolved m = " + std::to_string(static_cast<long long>(m)) +
                      " outside [1, n = " + std::to_string(config.n) + "]");
  }
  const auto resolved = static_cast<std::size_t>(m);
  if ((config.kind == ExperimentKind::epsilon ||
       config.kind == ExperimentKind::coupling_compare) &&
      config.n < 2) {
    throw ConfigError("epsilon experiments need n >= 2");
  }
  return resolved;
}

std::size_t default_trials(ExperimentKind kind, std::size_t n) {
  if (kind == ExperimentKind::borel) return 200;
  return n >= 2048 ? 5 : 10;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.kind = parse_experiment_kind(j.at("kind").get<std::string>());
    if (j.contains("n")) c.n = j.at("n").get<std::size_t>();
    if (j.contains("m")) c.m = j.at("m").get<std::size_t>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("beta")) c.beta = j.at("beta").get<double>();
    if (j.contains("m") + j.contains("alpha") + j.contains("beta") > 1) {
      throw ConfigError("give only one of m, alpha, beta");
    }
    c.trials = j.contains("trials") ? j.at("trials").get<std::size_t>()
                                    : default_trials(c.kind, c.n);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("coupling")) c.coupling = parse_coupling_kind(j.at("coupling").get<std::string>());
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("format")) c.format = parse_output_format(j.at("format").get<std::string>());
    if (j.contains("workers")) c.workers = j.at("workers").get<std::size_t>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["kind"] = to_string(c.kind);
  j["n"] = c.n;
  if (c.m) j["m"] = *c.m;
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.beta) j["beta"] = *c.beta;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["coupling"] = to_string(c.coupling);
  j["format"] = to_string(c.format);
  j["workers"] = c.workers;
  return j;
}

Report run(const ExperimentConfig& config) {
  const std::size_t m = resolve_m(config);
  Report report;
  report.config = config;
  report.m = m;
  if (config.kind == ExperimentKind::bounds_check) {
    report.checks = run_bound_checks(config.seed);
  } else {
    report.alpha = static_cast<double>(m) / static_cast<double>(config.n);
    report.envelope = theory::envelope(config.n, m);
    report.trials = run_trials(config, m);
    aggregate(report);
  }
  if (!config.out.empty()) emit(report, config.format, config.out);
  return report;
}

SweepTable sweep(const std::vector<ExperimentConfig>& grid) {
  if (grid.empty()) throw ConfigError("sweep: empty grid");
  SweepTable table;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepRow row;
    row.index = i;
    row.config = grid[i];
    row.config.out.clear();
    try {
      row.report = run(row.config);
    } catch (const std::exception& e) {
      row.error = "cell " + std::to_string(i) + " (n=" + std::to_string(grid[i].n) + "): " + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hgc
