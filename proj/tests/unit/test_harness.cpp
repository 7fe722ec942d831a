#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "hgc/error.hpp"
#include "hgc/harness.hpp"

using hgc::ExperimentConfig;
using hgc::ExperimentKind;

namespace {

ExperimentConfig make(ExperimentKind kind, std::size_t n) {
  ExperimentConfig c;
  c.kind = kind;
  c.n = n;
  c.trials = 3;
  c.seed = 17;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("m resolution") {
  auto c = make(ExperimentKind::epsilon, 256);
  c.beta = 1.0;
  CHECK(hgc::resolve_m(c) == 46);
  c.beta.reset();
  c.alpha = 0.3;
  CHECK(hgc::resolve_m(c) == 76);
  c.alpha = 1.0;
  CHECK(hgc::resolve_m(c) == 256);
  c.alpha.reset();
  CHECK_THROWS_AS(hgc::resolve_m(c), hgc::ConfigError);
  c.m = 10;
  CHECK(hgc::resolve_m(c) == 10);
  c.alpha = 0.5;
  CHECK_THROWS_AS(hgc::resolve_m(c), hgc::ConfigError);
  c.alpha.reset();
  c.m = 300;
  CHECK_THROWS_AS(hgc::resolve_m(c), hgc::ConfigError);
  c.m = 10;
  c.trials = 0;
  CHECK_THROWS_AS(hgc::resolve_m(c), hgc::ConfigError);
  auto b = make(ExperimentKind::borel, 64);
  CHECK_NOTHROW(hgc::resolve_m(b));
  CHECK(hgc::default_trials(ExperimentKind::borel, 512) == 200);
  CHECK(hgc::default_trials(ExperimentKind::row_norms, 2048) == 5);
  CHECK(hgc::default_trials(ExperimentKind::row_norms, 1024) == 10);
}

TEST_CASE("row-norms run is deterministic") {
  auto c = make(ExperimentKind::row_norms, 256);
  c.alpha = 1.0;
  c.trials = 2;
  const auto a = hgc::run(c), b = hgc::run(c);
  REQUIRE(a.trials.size() == 2);
  CHECK(hgc::to_csv(a) == hgc::to_csv(b));
  CHECK(a.trials[0].sup_F == b.trials[0].sup_F);
  CHECK(a.trials[0].sup_F != a.trials[1].sup_F);
  CHECK(a.trials[0].wall_time_ms == 0);
  CHECK(a.m == 256);
  CHECK(a.trials[0].predicted == doctest::Approx(std::sqrt(2.0 / 3.0 * 256)));
}

TEST_CASE("trial independence: worker count and order") {
  for (ExperimentKind kind : {ExperimentKind::row_norms, ExperimentKind::epsilon, ExperimentKind::gh_split,
                              ExperimentKind::coupling_compare, ExperimentKind::borel}) {
    CAPTURE(hgc::to_string(kind));
    auto c = make(kind, 128);
    if (kind != ExperimentKind::borel) c.alpha = 0.5;
    c.trials = 7;
    const std::string serial = hgc::to_csv(hgc::run(c));
    c.workers = 3;
    CHECK(hgc::to_csv(hgc::run(c)) == serial);
    c.workers = 8;
    CHECK(hgc::to_csv(hgc::run(c)) == serial);
    // a single trial run by itself equals that row of the batch
    auto one = c;
    one.trials = 1;
    one.workers = 1;
    const auto first = hgc::run(one);
    CHECK(first.trials[0].seed == hgc::run(c).trials[0].seed);
  }
}

TEST_CASE("coupling-compare pairs plain and randomized on the same Y, U") {
  auto c = make(ExperimentKind::coupling_compare, 256);
  c.beta = 1.0;
  const auto r = hgc::run(c);
  auto plain = c;
  plain.kind = ExperimentKind::epsilon;
  const auto p = hgc::run(plain);
  auto rnd = plain;
  rnd.coupling = hgc::CouplingKind::randomized;
  const auto q = hgc::run(rnd);
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    REQUIRE(r.trials[t].eps);
    REQUIRE(r.trials[t].eps_paired);
    CHECK(r.trials[t].eps->eps == p.trials[t].eps->eps);
    CHECK(r.trials[t].eps_paired->eps == q.trials[t].eps->eps);
    CHECK(r.trials[t].eps_paired->coupling == hgc::CouplingKind::randomized);
    // the row-block norms are rotation invariant
    CHECK(r.trials[t].sup_F == doctest::Approx(q.trials[t].sup_F).epsilon(1e-12));
  }
  const std::string csv = hgc::to_csv(r);
  CHECK(count_lines(csv) == 1 + 2 * r.trials.size());
}

TEST_CASE("seed isolation") {
  auto c = make(ExperimentKind::row_norms, 64);
  c.alpha = 0.5;
  const std::string base = hgc::to_csv(hgc::run(c));
  auto other = c;
  other.seed = 18;
  CHECK(hgc::to_csv(hgc::run(other)) != base);
  auto moved = c;
  moved.out = (std::filesystem::temp_directory_path() / "hgc_seed_isolation.csv").string();
  CHECK(hgc::to_csv(hgc::run(moved)) == base);
  std::filesystem::remove(moved.out);
}

TEST_CASE("CSV schema") {
  auto c = make(ExperimentKind::epsilon, 128);
  c.beta = 1.0;
  const std::string csv = hgc::to_csv(hgc::run(c));
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header == hgc::kCsvHeader);
  std::getline(in, row);
  CHECK(std::count(row.begin(), row.end(), ',') == std::count(header.begin(), header.end(), ','));
  CHECK(row.rfind("epsilon,128,26,", 0) == 0);
  CHECK(count_lines(csv) == 4);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345678.9, 0.0, 1e21}) {
    CHECK(std::stod(hgc::format_double(v)) == v);
  }
  CHECK(hgc::format_double(0.5) == "0.5");
}

TEST_CASE("JSON round trip reproduces numeric fields") {
  auto c = make(ExperimentKind::gh_split, 96);
  c.alpha = 0.5;
  const auto r = hgc::run(c);
  const nlohmann::json j = nlohmann::json::parse(hgc::to_json(r).dump());
  REQUIRE(j["trials"].size() == r.trials.size());
  for (std::size_t t = 0; t < r.trials.size(); ++t) {
    const auto& jt = j["trials"][t];
    CHECK(jt["sup_F"].get<double>() == r.trials[t].sup_F);
    CHECK(jt["inf_F"].get<double>() == r.trials[t].inf_F);
    CHECK(jt["mean_F"].get<double>() == r.trials[t].mean_F);
    CHECK(jt["gh"]["g2_over_m"].get<double>() == r.trials[t].gh->g2_over_m);
    CHECK(jt["seed"].get<std::uint64_t>() == r.trials[t].seed);
  }
  CHECK(j["aggregate"]["sup_F"]["q50"].get<double>() == r.aggregate.at("sup_F").q50);
  const auto back = hgc::config_from_json(j["config"]);
  CHECK(hgc::to_csv(hgc::run(back)) == hgc::to_csv(r));
}

TEST_CASE("config JSON schema") {
  const auto c = hgc::config_from_json(nlohmann::json::parse(
      R"({"kind": "epsilon", "n": 512, "beta": 1, "trials": 4, "seed": 3, "coupling": "randomized",
          "out": "x.json", "format": "json"})"));
  CHECK(c.kind == ExperimentKind::epsilon);
  CHECK(c.n == 512);
  CHECK(c.beta == 1.0);
  CHECK(c.coupling == hgc::CouplingKind::randomized);
  CHECK(c.format == hgc::OutputFormat::json);
  CHECK(c.workers == 1);
  CHECK_THROWS_AS(hgc::config_from_json(nlohmann::json::parse(R"({"kind": "nope", "n": 4, "m": 1})")),
                  hgc::ConfigError);
  CHECK_THROWS_AS(hgc::config_from_json(nlohmann::json::parse(R"({"kind": "epsilon", "n": 4, "m": 1, "alpha": 1})")),
                  hgc::ConfigError);
}

TEST_CASE("SVG is well formed with one polyline per series") {
  auto c = make(ExperimentKind::row_norms, 64);
  c.alpha = 0.5;
  const std::string svg = hgc::to_svg(hgc::run(c));
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  // crude tag balance: every opened element is closed or self-closed
  const std::regex open("<([a-z]+)[ >/]"), close("</([a-z]+)>");
  const std::regex selfclose("<[a-z]+[^>]*/>");
  const auto n_open = std::distance(std::sregex_iterator(svg.begin(), svg.end(), open), std::sregex_iterator());
  const auto n_close = std::distance(std::sregex_iterator(svg.begin(), svg.end(), close), std::sregex_iterator());
  const auto n_self = std::distance(std::sregex_iterator(svg.begin(), svg.end(), selfclose), std::sregex_iterator());
  CHECK(n_open == n_close + n_self);
  const std::regex poly("<polyline");
  const auto lines = std::distance(std::sregex_iterator(svg.begin(), svg.end(), poly), std::sregex_iterator());
  CHECK(lines >= 2);
}

TEST_CASE("sweep") {
  SUBCASE("rows in grid order") {
    std::vector<ExperimentConfig> grid;
    for (std::size_t n : {256, 512}) {
      auto c = make(ExperimentKind::row_norms, n);
      c.alpha = 1.0;
      c.trials = 1;
      grid.push_back(c);
    }
    const auto t = hgc::sweep(grid);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].config.n == 256);
    CHECK(t.rows[1].config.n == 512);
    CHECK(t.rows[0].report);
    const std::string csv = hgc::to_csv(t);
    CHECK(csv.rfind(std::string(hgc::kSweepCsvHeader), 0) == 0);
    CHECK(count_lines(csv) == 3);
  }
  SUBCASE("empty grid") { CHECK_THROWS_AS(hgc::sweep({}), hgc::ConfigError); }
  SUBCASE("a failing cell is isolated") {
    auto bad = make(ExperimentKind::row_norms, 2);
    bad.m = 2;
    bad.trials = 1;
    bad.perturb_gaussian = [](hgc::Matrix& y, std::size_t) {
      y(0, 1) = y(0, 0);
      y(1, 1) = y(1, 0);
    };
    auto good = make(ExperimentKind::row_norms, 64);
    good.alpha = 1.0;
    good.trials = 1;
    const auto t = hgc::sweep({bad, good});
    REQUIRE(t.rows.size() == 2);
    CHECK_FALSE(t.rows[0].report);
    CHECK(t.rows[0].error.find("degenerate column 2") != std::string::npos);
    CHECK(t.rows[1].report);
    CHECK(t.rows[1].error.empty());
    CHECK(hgc::to_csv(t).find("error") != std::string::npos);
  }
}

TEST_CASE("run reports the failing trial") {
  auto c = make(ExperimentKind::row_norms, 8);
  c.m = 4;
  c.trials = 4;
  c.workers = 2;
  c.perturb_gaussian = [](hgc::Matrix& y, std::size_t trial) {
    if (trial == 2)
      for (std::size_t i = 0; i < y.rows(); ++i) y(i, 3) = 0.0;
  };
  try {
    hgc::run(c);
    FAIL("expected NumericalError");
  } catch (const hgc::NumericalError& e) {
    CHECK(std::string(e.what()).find("trial 2") != std::string::npos);
  }
}

TEST_CASE("emit writes files and reports I/O errors") {
  auto c = make(ExperimentKind::row_norms, 32);
  c.alpha = 1.0;
  c.trials = 1;
  const auto r = hgc::run(c);
  const auto path = std::filesystem::temp_directory_path() / "hgc_emit_test.csv";
  hgc::emit(r, hgc::OutputFormat::csv, path.string());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == hgc::to_csv(r));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(hgc::emit(r, hgc::OutputFormat::csv, "/nonexistent-dir/x.csv"), hgc::IoError);
}

TEST_CASE("bound checks all hold") {
  for (const auto& b : hgc::run_bound_checks(5)) {
    CAPTURE(b.name);
    CHECK(b.holds);
    CHECK(b.empirical <= b.bound);
    if (b.lower_bound) CHECK(*b.lower_bound <= b.empirical);
  }
}
