#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isoband/band.hpp"
#include "isoband/calibrate.hpp"
#include "isoband/design.hpp"
#include "isoband/execution.hpp"

namespace isoband {

/// Synthetic scenario catalog. The curves live on (x_min, x_max); the step
/// curve jumps at the midpoint and the logistic curve is S-shaped with its
/// inflection there.
enum class CurveKind { sqrt, linear, constant, step, logistic };
enum class NoiseKind { gaussian, laplace };
enum class DesignKind { equispaced, uniform };

std::string to_string(CurveKind kind);
std::string to_string(NoiseKind kind);
std::string to_string(DesignKind kind);
CurveKind parse_curve(const std::string& name);
NoiseKind parse_noise(const std::string& name);
DesignKind parse_design(const std::string& name);

struct ScenarioSpec {
  std::string name = "scenario";
  std::size_t n = 100;
  DesignKind design = DesignKind::equispaced;
  double x_min = 0.0;
  double x_max = 50.0;
  CurveKind curve = CurveKind::sqrt;
  NoiseKind noise = NoiseKind::gaussian;
  double noise_scale = 1.0;
  /// Scale family: the noise scale grows linearly from 0.5 to 1.5 times
  /// noise_scale across the design range. Requires gamma >= 0.5 so the
  /// quantile curve stays isotonic.
  bool scale_family = false;
  double gamma = 0.5;
  double alpha = 0.1;
  CardinalityRule rule{};
  KappaMethod method = Bonferroni{};
  std::uint64_t replicates = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Mean function m(x) of the location model.
double curve_value(const ScenarioSpec& spec, double x);

/// True conditional gamma-quantile Q_gamma(x).
double true_quantile(const ScenarioSpec& spec, double x);

/// Data set of replicate `replicate`; depends only on (spec, replicate).
Dataset generate_data(const ScenarioSpec& spec, std::uint64_t replicate);

/// Full pipeline on one data set: grid, family, calibration, band.
ConfidenceBand run_pipeline(const Dataset& data, const CardinalityRule& rule,
                            const CalibrationConfig& config, Execution exec = Execution::parallel);

struct CoverageReport {
  ScenarioSpec spec;
  std::uint64_t covered = 0;
  double coverage = 0.0;
  double standard_error = 0.0;
  double kappa = 0.0;  // kappa of replicate 0
  double median_central_width = 0.0;
  double mean_finite_width = 0.0;  // mean of (U - L) over grid points with a finite band
  double runtime_ms = 0.0;
};

/// Empirical simultaneous coverage of Q_gamma at the grid points.
CoverageReport run_coverage(const ScenarioSpec& spec, Execution exec = Execution::parallel);

struct RateRow {
  std::size_t n = 0;
  double median_central_width = 0.0;
  double median_edge_width = 0.0;       // at 10% and 90% of the range, averaged
  double median_crossing_window = 0.0;  // step curve only, NaN otherwise
};

struct RateReport {
  ScenarioSpec spec;  // n is ignored
  std::vector<RateRow> rows;
  /// Least-squares slope of log central width on log(log(n)/n). Recorded for
  /// comparison with 1/3; not asserted.
  double log_width_slope = 0.0;
  double runtime_ms = 0.0;
};

RateReport run_rate_diagnostic(const ScenarioSpec& spec, const std::vector<std::size_t>& ns,
                               Execution exec = Execution::parallel);

/// Length of {x : L(x) <= level <= U(x)} measured on the grid.
double crossing_window(const ConfidenceBand& band, double level);

}  // namespace isoband
