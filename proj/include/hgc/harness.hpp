#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hgc/matrix.hpp"
#include "hgc/measure.hpp"
#include "hgc/theory.hpp"

namespace hgc {

enum class ExperimentKind { row_norms, gh_split, epsilon, coupling_compare, borel, bounds_check, sweep };
enum class OutputFormat { csv, json, svg };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(OutputFormat format);
ExperimentKind parse_experiment_kind(std::string_view name);
OutputFormat parse_output_format(std::string_view name);

/// Declarative description of one experiment. Exactly one of m, alpha, beta
/// fixes the block width: m directly, m = ⌊alpha n⌋ or m = ⌊beta n / ln n⌋.
/// borel and bounds-check need no block width.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::row_norms;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  CouplingKind coupling = CouplingKind::plain_gs;
  std::string out;
  OutputFormat format = OutputFormat::csv;
  std::size_t workers = 1;
  /// Zero the wall-time fields so every output is byte-reproducible.
  bool deterministic = true;

  /// Test hook: called on each trial's Gaussian matrix before coupling.
  std::function<void(Matrix&, std::size_t trial)> perturb_gaussian;
};

/// Checks the config invariants and returns the resolved block width m
/// (1 for kinds that need none). Throws ConfigError.
std::size_t resolve_m(const ExperimentConfig& config);

/// Default trial count for a kind and dimension: 200 for borel, 5 for
/// n >= 2048, otherwise 10.
std::size_t default_trials(ExperimentKind kind, std::size_t n);

/// Parses the JSON config schema; unknown kinds/couplings/formats and
/// multiple size specs are ConfigErrors.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

struct GhStats {
  double g2_over_m = 0.0;         ///< mean_i ||G_i^m||² / m
  double h2_over_m = 0.0;         ///< mean_i ||H_i^m||² / m
  double max_cross_over_m = 0.0;  ///< max_i |<G_i^m, H_i^m>| / m
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;  ///< key of substream (root, [trial])
  double sup_F = 0.0;
  double inf_F = 0.0;
  double mean_F = 0.0;
  double predicted = 0.0;
  double ratio_sup = 0.0;
  double ratio_inf = 0.0;
  std::optional<SupStatistic> eps;
  /// coupling-compare only: the randomized coupling on the same Y and U
  /// (eps then holds the plain Gram–Schmidt value).
  std::optional<SupStatistic> eps_paired;
  std::optional<GhStats> gh;
  std::optional<double> borel_sample;  ///< sqrt(n) u_11
  std::int64_t wall_time_ms = 0;

  /// (sup - inf) / mean of the truncated row norms.
  double flatness() const { return (sup_F - inf_F) / mean_F; }
};

/// One analytic bound set against a Monte Carlo frequency.
struct BoundCheck {
  std::string name;
  std::string parameters;
  double bound = 0.0;
  double empirical = 0.0;
  std::size_t samples = 0;
  /// For two-sided checks (the Mills-ratio lower bound) the lower end.
  std::optional<double> lower_bound;
  bool holds = false;
};

struct Report {
  ExperimentConfig config;
  std::size_t m = 0;
  double alpha = 0.0;
  theory::TheoryEnvelope envelope;
  std::vector<TrialResult> trials;
  /// Summaries over trials keyed by statistic name.
  std::map<std::string, Summary> aggregate;
  /// borel only: KS distance of the pooled samples to N(0, 1).
  std::optional<double> ks;
  std::vector<BoundCheck> checks;
};

/// Runs `trials` independent trials (trial t uses substream (seed, [t])),
/// optionally on `workers` threads, and aggregates in trial order.
/// Throws ConfigError, NumericalError (naming the trial) and, via emit, IoError.
Report run(const ExperimentConfig& config);

/// The Monte Carlo bound-dominance checks (bounds-check kind).
std::vector<BoundCheck> run_bound_checks(std::uint64_t seed);

struct SweepRow {
  std::size_t index = 0;
  ExperimentConfig config;
  std::optional<Report> report;
  std::string error;  ///< non-empty when the cell failed
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// Runs every cell in order; a failing cell yields an error record and the
/// remaining cells still run. Throws ConfigError on an empty grid.
SweepTable sweep(const std::vector<ExperimentConfig>& grid);

// Persistence.

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

inline constexpr std::string_view kCsvHeader =
    "kind,n,m,alpha,beta,trial,seed,coupling,sup_F,inf_F,mean_F,predicted,ratio_sup,ratio_inf,"
    "eps,eps_lower,eps_upper,g2_over_m,h2_over_m,max_cross_over_m,ks";
inline constexpr std::string_view kBoundsCsvHeader =
    "check,parameters,lower_bound,bound,empirical,samples,holds";
inline constexpr std::string_view kSweepCsvHeader =
    "index,kind,n,m,alpha,beta,trials,coupling,status,predicted,ratio_sup_median,"
    "ratio_inf_median,flatness_median,eps_median,eps_lower,eps_upper,error";

std::string to_csv(const Report& report);
nlohmann::json to_json(const Report& report);
std::string to_svg(const Report& report);

std::string to_csv(const SweepTable& table);
nlohmann::json to_json(const SweepTable& table);
std::string to_svg(const SweepTable& table);

/// Writes the report in `format` to `path`. Throws IoError.
void emit(const Report& report, OutputFormat format, const std::string& path);
void emit(const SweepTable& table, OutputFormat format, const std::string& path);

}  // namespace hgc
