#include "isoband/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "isoband/band.hpp"
#include "isoband/calibrate.hpp"
#include "isoband/design.hpp"
#include "isoband/io.hpp"
#include "isoband/plot.hpp"
#include "isoband/simulate.hpp"
#include "isoband/sshape.hpp"

namespace isoband {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Calibrated {
  CardinalityRule rule;
  CalibrationConfig config;
};

Calibrated resolve(const RunConfig& cfg) {
  Calibrated c;
  try {
    c.rule.kind = parse_rule_kind(cfg.family);
    c.rule.cap = parse_cap(cfg.cap);
    c.config = CalibrationConfig{cfg.gamma, cfg.alpha, parse_kappa_spec(cfg.kappa, cfg.seed)};
    c.config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::string stem_of(const std::string& path) {
  const std::string suffix = ".csv";
  if (path.size() > suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path + "'");
  f << content;
  if (!f) throw DataError("write failed for '" + path + "'");
}

std::string table_text(const BandTable& t) {
  std::ostringstream ss;
  write_band_csv(ss, t);
  return ss.str();
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void add_calibration_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--gamma", cfg.gamma, "quantile level in (0,1)")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "error level in (0,1)")->capture_default_str();
  cmd->add_option("--family", cfg.family, "cardinality rule")
      ->check(CLI::IsMember({"all", "triangular", "fibonacci", "pow2"}))
      ->capture_default_str();
  cmd->add_option("--cap", cfg.cap, "cardinality cap")
      ->check(CLI::IsMember({"half", "full"}))
      ->capture_default_str();
  cmd->add_option("--kappa", cfg.kappa, "bonferroni | mc:<reps> | fixed:<value>")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
}

int cmd_band(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Calibrated c = resolve(cfg);
  if (cfg.sshape && cfg.out.empty()) throw UsageError("--sshape needs --out");
  const Dataset data = read_dataset(cfg.input);

  const auto start = std::chrono::steady_clock::now();
  const Grid grid = build_grid(data);
  const IntervalFamily family(grid, c.rule);
  const CriticalValues cv = calibrate(family, grid, c.config);
  const ConfidenceBand band = compute_band(data, grid, family, cv);
  std::optional<SShapeRefinement> refined;
  InflectionGrid mu;
  if (cfg.sshape) {
    try {
      mu = parse_mu_grid(cfg.mu_grid, grid);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    refined = refine(band, mu);
  }
  const double runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  RunMetadata meta;
  meta.gamma = c.config.gamma;
  meta.alpha = c.config.alpha;
  meta.kappa = cv.kappa;
  meta.method = method_name(c.config.method);
  if (const auto* mc = std::get_if<MonteCarlo>(&c.config.method)) {
    meta.reps = mc->reps;
    meta.seed = mc->seed;
  }
  meta.family = to_string(c.rule.kind);
  meta.cap = to_string(c.rule.cap);
  meta.n = data.size();
  meta.n_distinct = grid.distinct();
  meta.family_size = family.size();
  meta.crossing_flag = band.crosses();
  meta.runtime_ms = runtime_ms;

  std::string extra = "{}";
  if (refined) {
    std::size_t feasible = 0;
    for (const auto& f : refined->feasible_mu) feasible += f.feasible ? 1 : 0;
    std::ostringstream ss;
    ss << "{\"sshape\": {\"mu_grid\": \"" << cfg.mu_grid << "\", \"mu_count\": " << mu.points.size()
       << ", \"feasible_mu_count\": " << feasible
       << ", \"any_feasible\": " << (refined->any_feasible ? "true" : "false") << "}}";
    extra = ss.str();
  }

  std::ostream& summary = cfg.out.empty() ? err : out;
  if (cfg.out.empty()) {
    write_band_csv(out, to_table(band));
  } else {
    const std::string stem = stem_of(cfg.out);
    write_file(cfg.out, table_text(to_table(band)));
    write_file(stem + ".json", metadata_json(meta, extra));
    if (refined) write_file(stem + ".sshape.csv", table_text(to_table(grid, *refined)));
  }
  if (!cfg.plot.empty()) {
    PlotData plot;
    plot.points.assign(data.pairs().begin(), data.pairs().end());
    plot.band = to_table(band);
    if (refined) plot.refined = to_table(grid, *refined);
    write_file(cfg.plot, render_svg(plot));
  }

  summary << "kappa: " << format_double(cv.kappa) << "\n";
  summary << "family_size: " << family.size() << "\n";
  summary << "runtime_ms: " << runtime_ms << "\n";
  if (meta.crossing_flag) summary << "warning: lower bound exceeds upper bound somewhere\n";
  if (refined && !refined->any_feasible) summary << "warning: no S-shaped function fits the band\n";
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, std::size_t n_distinct, std::ostream& out) {
  const Calibrated c = resolve(cfg);
  if (cfg.input.empty() == (n_distinct == 0)) {
    throw UsageError("give either an input file or --n-distinct");
  }
  std::vector<Observation> pairs;
  if (cfg.input.empty()) {
    for (std::size_t i = 0; i < n_distinct; ++i) pairs.push_back({static_cast<double>(i + 1), 0.0});
  }
  const Dataset data = cfg.input.empty() ? Dataset(std::move(pairs)) : read_dataset(cfg.input);
  const auto start = std::chrono::steady_clock::now();
  const Grid grid = build_grid(data);
  const IntervalFamily family(grid, c.rule);
  const CriticalValues cv = calibrate(family, grid, c.config);
  const double runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out << "kappa: " << format_double(cv.kappa) << "\n";
  out << "method: " << method_name(c.config.method) << "\n";
  out << "family: " << to_string(c.rule.kind) << " cap=" << to_string(c.rule.cap) << "\n";
  out << "family_size: " << family.size() << "\n";
  out << "n: " << data.size() << " n_distinct: " << grid.distinct() << "\n";
  out << "runtime_ms: " << runtime_ms << "\n";
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path, std::ostream& out) {
  const auto entries = parse_scenarios(read_text(scenario_path));
  std::vector<std::string> docs;
  for (const auto& e : entries) {
    if (e.ns.empty()) {
      const CoverageReport r = run_coverage(e.spec);
      out << e.spec.name << ": n=" << e.spec.n << " gamma=" << e.spec.gamma
          << " method=" << method_name(e.spec.method) << " kappa=" << format_double(r.kappa)
          << " coverage=" << r.coverage << " se=" << r.standard_error
          << " median_central_width=" << r.median_central_width << "\n";
      docs.push_back(report_json(r));
    } else {
      const RateReport r = run_rate_diagnostic(e.spec, e.ns);
      out << e.spec.name << ": rate diagnostic\n";
      out << "  n  median_central_width  median_edge_width  median_crossing_window\n";
      for (const auto& row : r.rows) {
        out << "  " << row.n << "  " << row.median_central_width << "  " << row.median_edge_width
            << "  " << row.median_crossing_window << "\n";
      }
      out << "  log-width slope vs log(log n / n): " << r.log_width_slope << " (reference 1/3)\n";
      docs.push_back(report_json(r));
    }
  }
  if (!out_path.empty()) write_file(out_path, reports_json(docs));
  return kExitOk;
}

int cmd_plot(const std::string& band_path, const std::string& data_path,
             const std::string& refined_path, const std::string& reference_path,
             const std::string& out_path, std::ostream& out) {
  PlotData plot;
  plot.band = read_band_file(band_path);
  if (!data_path.empty()) {
    const Dataset data = read_dataset(data_path);
    plot.points.assign(data.pairs().begin(), data.pairs().end());
  }
  if (!refined_path.empty()) plot.refined = read_band_file(refined_path);
  if (!reference_path.empty()) {
    std::ifstream in(reference_path);
    if (!in) throw DataError("cannot open '" + reference_path + "'");
    plot.reference = read_xy_csv(in);
  }
  const std::string svg = render_svg(plot);
  if (out_path.empty()) {
    out << svg;
  } else {
    write_file(out_path, svg);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confidence bands for isotonic quantile curves", "isoband"};
  app.require_subcommand(1);

  RunConfig band_cfg;
  auto* band = app.add_subcommand("band", "compute the band for an x,y CSV file");
  band->add_option("input", band_cfg.input, "input CSV with header x,y")->required();
  add_calibration_options(band, band_cfg);
  band->add_flag("--sshape", band_cfg.sshape, "also compute the S-shaped refinement");
  band->add_option("--mu-grid", band_cfg.mu_grid, "midpoints | uniform:<k> | list:<v1>,<v2>,...")
      ->capture_default_str();
  band->add_option("--out", band_cfg.out, "band CSV path; metadata goes next to it as .json");
  band->add_option("--plot", band_cfg.plot, "SVG output path");

  RunConfig cal_cfg;
  std::size_t n_distinct = 0;
  auto* cal = app.add_subcommand("calibrate", "compute kappa only");
  cal->add_option("input", cal_cfg.input, "input CSV with header x,y");
  cal->add_option("--n-distinct", n_distinct, "use a tie-free design with this many points");
  add_calibration_options(cal, cal_cfg);

  std::string scenario_path, report_path;
  auto* sim = app.add_subcommand("simulate", "run coverage or rate scenarios from a JSON file");
  sim->add_option("scenarios", scenario_path, "scenario file")->required();
  sim->add_option("--out", report_path, "JSON report path");

  std::string plot_band, plot_data, plot_refined, plot_reference, plot_out;
  auto* plt = app.add_subcommand("plot", "render a band table as SVG");
  plt->add_option("band", plot_band, "band CSV (z,lower,upper)")->required();
  plt->add_option("--data", plot_data, "x,y CSV of observations");
  plt->add_option("--refined", plot_refined, "refined band CSV");
  plt->add_option("--reference", plot_reference, "x,y CSV of a reference curve");
  plt->add_option("--out", plot_out, "SVG path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*band) return cmd_band(band_cfg, out, err);
    if (*cal) return cmd_calibrate(cal_cfg, n_distinct, out);
    if (*sim) return cmd_simulate(scenario_path, report_path, out);
    return cmd_plot(plot_band, plot_data, plot_refined, plot_reference, plot_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace isoband
