#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "hgc/error.hpp"
#include "hgc/harness.hpp"

namespace hgc {

namespace {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const LineChart& chart) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const Series& s : chart.series) {
    for (double x : s.xs) x0 = std::min(x0, x), x1 = std::max(x1, x);
    for (double y : s.ys) y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x0 == x1) x0 -= 0.5, x1 += 0.5;
  if (y0 == y1) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * plot_h; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(chart.title) << "</text>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
     << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
     << kTop + plot_h << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xml_escape(chart.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << kTop + plot_h / 2 << ")\">" << xml_escape(chart.y_label)
     << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x0 + (x1 - x0) * tick / 4.0;
    const double fy = y0 + (y1 - y0) * tick / 4.0;
    os << "<text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(fx) << "</text>\n"
       << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(fy) + 3
       << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(std::round(fy * 1e4) / 1e4)
       << "</text>\n";
  }
  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const Series& series = chart.series[s];
    const char* color = colors[s % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series.xs.size(); ++i) {
      if (i) os << ' ';
      os << px(series.xs[i]) << ',' << py(series.ys[i]);
    }
    os << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    os << "<text x=\"" << kLeft + plot_w + 12 << "\" y=\"" << ly << "\" font-size=\"11\" fill=\""
       << color << "\">" << xml_escape(series.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string join(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string trial_row(const Report& report, const TrialResult& r, const SupStatistic* eps) {
  const ExperimentConfig& c = report.config;
  const bool has_block = !r.borel_sample;
  auto block = [&](double v) { return has_block ? format_double(v) : std::string(); };
  const CouplingKind coupling = eps ? eps->coupling : c.coupling;
  return join({std::string(to_string(c.kind)),
               std::to_string(c.n),
               has_block ? std::to_string(report.m) : std::string(),
               has_block ? format_double(report.alpha) : std::string(),
               opt(c.beta),
               std::to_string(r.trial),
               std::to_string(r.seed),
               std::string(to_string(coupling)),
               block(r.sup_F),
               block(r.inf_F),
               block(r.mean_F),
               block(r.predicted),
               block(r.ratio_sup),
               block(r.ratio_inf),
               eps ? format_double(eps->eps) : std::string(),
               eps ? format_double(report.envelope.eps_lower) : std::string(),
               eps ? format_double(report.envelope.eps_upper) : std::string(),
               r.gh ? format_double(r.gh->g2_over_m) : std::string(),
               r.gh ? format_double(r.gh->h2_over_m) : std::string(),
               r.gh ? format_double(r.gh->max_cross_over_m) : std::string(),
               opt(report.ks)});
}

nlohmann::json sup_json(const SupStatistic& s) {
  nlohmann::json j{{"eps", s.eps}, {"n", s.n}, {"m", s.m}, {"coupling", to_string(s.coupling)}};
  if (s.beta) j["beta"] = *s.beta;
  return j;
}

nlohmann::json summary_json(const Summary& s) {
  return {{"sup", s.sup}, {"inf", s.inf}, {"mean", s.mean}, {"std", s.std},
          {"q05", s.q05}, {"q50", s.q50}, {"q95", s.q95}};
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError(path, "cannot open for writing");
  f << contents;
  f.flush();
  if (!f) throw IoError(path, "write failed");
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return {buf, res.ptr};
}

std::string to_csv(const Report& report) {
  std::string out;
  if (report.config.kind == ExperimentKind::bounds_check) {
    out.append(kBoundsCsvHeader).append("\n");
    for (const BoundCheck& c : report.checks) {
      out += join({c.name, csv_field(c.parameters), opt(c.lower_bound), format_double(c.bound),
                   format_double(c.empirical), std::to_string(c.samples),
                   c.holds ? "true" : "false"});
      out += '\n';
    }
    return out;
  }
  out.append(kCsvHeader).append("\n");
  for (const TrialResult& r : report.trials) {
    out += trial_row(report, r, r.eps ? &*r.eps : nullptr) + '\n';
    if (r.eps_paired) out += trial_row(report, r, &*r.eps_paired) + '\n';
  }
  return out;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json j;
  j["config"] = config_to_json(report.config);
  if (report.config.kind == ExperimentKind::bounds_check) {
    nlohmann::json checks = nlohmann::json::array();
    for (const BoundCheck& c : report.checks) {
      nlohmann::json e{{"name", c.name},       {"parameters", c.parameters},
                       {"bound", c.bound},     {"empirical", c.empirical},
                       {"samples", c.samples}, {"holds", c.holds}};
      if (c.lower_bound) e["lower_bound"] = *c.lower_bound;
      checks.push_back(e);
    }
    j["checks"] = checks;
    return j;
  }
  j["m"] = report.m;
  j["alpha"] = report.alpha;
  const theory::TheoryEnvelope& env = report.envelope;
  j["envelope"] = {{"alpha", env.alpha},
                   {"phi", env.phi},
                   {"row_norm_target", env.row_norm_target},
                   {"eps_lower", env.eps_lower},
                   {"eps_upper", env.eps_upper},
                   {"slack", env.slack},
                   {"correction_exponent", env.correction_exponent},
                   {"label", "leading order"}};
  nlohmann::json trials = nlohmann::json::array();
  for (const TrialResult& r : report.trials) {
    nlohmann::json t{{"trial", r.trial}, {"seed", r.seed}, {"wall_time_ms", r.wall_time_ms}};
    if (r.borel_sample) {
      t["borel_sample"] = *r.borel_sample;
    } else {
      t["sup_F"] = r.sup_F;
      t["inf_F"] = r.inf_F;
      t["mean_F"] = r.mean_F;
      t["predicted"] = r.predicted;
      t["ratio_sup"] = r.ratio_sup;
      t["ratio_inf"] = r.ratio_inf;
    }
    if (r.eps) t["eps"] = sup_json(*r.eps);
    if (r.eps_paired) t["eps_paired"] = sup_json(*r.eps_paired);
    if (r.gh) {
      t["gh"] = {{"g2_over_m", r.gh->g2_over_m},
                 {"h2_over_m", r.gh->h2_over_m},
                 {"max_cross_over_m", r.gh->max_cross_over_m}};
    }
    trials.push_back(t);
  }
  j["trials"] = trials;
  nlohmann::json agg = nlohmann::json::object();
  for (const auto& [name, s] : report.aggregate) agg[name] = summary_json(s);
  j["aggregate"] = agg;
  if (report.ks) j["ks"] = *report.ks;
  return j;
}

std::string to_svg(const Report& report) {
  LineChart chart;
  const ExperimentConfig& c = report.config;
  if (c.kind == ExperimentKind::bounds_check) {
    chart.title = "analytic bound vs Monte Carlo frequency";
    chart.x_label = "check";
    chart.y_label = "probability";
    Series bound{"bound", {}, {}}, empirical{"empirical", {}, {}};
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
      bound.xs.push_back(static_cast<double>(i));
      bound.ys.push_back(report.checks[i].bound);
      empirical.xs.push_back(static_cast<double>(i));
      empirical.ys.push_back(report.checks[i].empirical);
    }
    chart.series = {bound, empirical};
    return render_svg(chart);
  }

  chart.x_label = "trial";
  auto per_trial = [&](std::string name, auto get) {
    Series s{std::move(name), {}, {}};
    for (const TrialResult& r : report.trials) {
      s.xs.push_back(static_cast<double>(r.trial));
      s.ys.push_back(get(r));
    }
    return s;
  };
  const bool has_eps = !report.trials.empty() && report.trials.front().eps.has_value();
  if (c.kind == ExperimentKind::borel) {
    chart.title = "sqrt(n) u_11 per trial, n = " + std::to_string(c.n);
    chart.y_label = "sqrt(n) u_11";
    chart.series.push_back(per_trial("sqrt(n) u_11", [](const TrialResult& r) { return *r.borel_sample; }));
  } else if (has_eps) {
    chart.title = "eps_n(m) vs leading-order envelope, n = " + std::to_string(c.n) +
                  ", m = " + std::to_string(report.m);
    chart.y_label = "eps_n(m)";
    chart.series.push_back(per_trial(std::string(to_string(report.trials.front().eps->coupling)),
                                     [](const TrialResult& r) { return r.eps->eps; }));
    if (report.trials.front().eps_paired) {
      chart.series.push_back(per_trial("randomized", [](const TrialResult& r) { return r.eps_paired->eps; }));
    }
    const double lo = report.envelope.eps_lower, hi = report.envelope.eps_upper;
    chart.series.push_back(per_trial("envelope lower", [lo](const TrialResult&) { return lo; }));
    chart.series.push_back(per_trial("envelope upper", [hi](const TrialResult&) { return hi; }));
  } else {
    chart.title = "row-norm ratio to sqrt(phi m), n = " + std::to_string(c.n) +
                  ", m = " + std::to_string(report.m);
    chart.y_label = "ratio";
    chart.series.push_back(per_trial("sup ratio", [](const TrialResult& r) { return r.ratio_sup; }));
    chart.series.push_back(per_trial("inf ratio", [](const TrialResult& r) { return r.ratio_inf; }));
  }
  return render_svg(chart);
}

std::string to_csv(const SweepTable& table) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const SweepRow& row : table.rows) {
    const ExperimentConfig& c = row.config;
    std::vector<std::string> f{std::to_string(row.index), std::string(to_string(c.kind)),
                               std::to_string(c.n)};
    if (row.report) {
      const Report& r = *row.report;
      auto med = [&](const char* key) {
        auto it = r.aggregate.find(key);
        return it == r.aggregate.end() ? std::string() : format_double(it->second.q50);
      };
      const bool has_eps = r.aggregate.count("eps") != 0;
      f.insert(f.end(), {std::to_string(r.m), format_double(r.alpha), opt(c.beta),
                         std::to_string(c.trials), std::string(to_string(c.coupling)), "ok",
                         format_double(r.envelope.row_norm_target), med("ratio_sup"),
                         med("ratio_inf"), med("flatness"), med("eps"),
                         has_eps ? format_double(r.envelope.eps_lower) : std::string(),
                         has_eps ? format_double(r.envelope.eps_upper) : std::string(), ""});
    } else {
      f.insert(f.end(), {c.m ? std::to_string(*c.m) : std::string(), opt(c.alpha), opt(c.beta),
                         std::to_string(c.trials), std::string(to_string(c.coupling)), "error", "",
                         "", "", "", "", "", "", csv_field(row.error)});
    }
    out += join(f) + '\n';
  }
  return out;
}

nlohmann::json to_json(const SweepTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& row : table.rows) {
    nlohmann::json j{{"index", row.index}, {"config", config_to_json(row.config)}};
    if (row.report) {
      j["status"] = "ok";
      j["report"] = to_json(*row.report);
    } else {
      j["status"] = "error";
      j["error"] = row.error;
    }
    rows.push_back(j);
  }
  return {{"rows", rows}};
}

std::string to_svg(const SweepTable& table) {
  LineChart chart;
  chart.title = "median row-norm ratio vs n";
  chart.x_label = "n";
  chart.y_label = "median ratio to sqrt(phi m)";
  Series sup{"sup ratio", {}, {}}, inf{"inf ratio", {}, {}}, eps{"median eps", {}, {}};
  for (const SweepRow& row : table.rows) {
    if (!row.report) continue;
    const auto& agg = row.report->aggregate;
    const double n = static_cast<double>(row.config.n);
    if (auto it = agg.find("ratio_sup"); it != agg.end()) sup.xs.push_back(n), sup.ys.push_back(it->second.q50);
    if (auto it = agg.find("ratio_inf"); it != agg.end()) inf.xs.push_back(n), inf.ys.push_back(it->second.q50);
    if (auto it = agg.find("eps"); it != agg.end()) eps.xs.push_back(n), eps.ys.push_back(it->second.q50);
  }
  chart.series = {sup, inf};
  if (!eps.xs.empty()) chart.series.push_back(eps);
  return render_svg(chart);
}

void emit(const Report& report, OutputFormat format, const std::string& path) {
  switch (format) {
    case OutputFormat::csv:
      write_file(path, to_csv(report));
      break;
    case OutputFormat::json:
      write_file(path, to_json(report).dump(2) + "\n");
      break;
    case OutputFormat::svg:
      write_file(path, to_svg(report));
      break;
  }
}

void emit(const SweepTable& table, OutputFormat format, const std::string& path) {
  switch (format) {
    case OutputFormat::csv:
      write_file(path, to_csv(table));
      break;
    case OutputFormat::json:
      write_file(path, to_json(table).dump(2) + "\n");
      break;
    case OutputFormat::svg:
      write_file(path, to_svg(table));
      break;
  }
}

}  // namespace hgc
