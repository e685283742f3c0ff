#include "isoband/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "isoband/rng.hpp"

namespace isoband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double noise_quantile(NoiseKind kind, double u) {
  if (kind == NoiseKind::gaussian) {
    static const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, u);
  }
  // Laplace with unit scale.
  return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
}

double noise_scale_at(const ScenarioSpec& spec, double x) {
  if (!spec.scale_family) return spec.noise_scale;
  const double w = (x - spec.x_min) / (spec.x_max - spec.x_min);
  return spec.noise_scale * (0.5 + std::clamp(w, 0.0, 1.0));
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h));
  return 0.5 * (lower + upper);
}

double width_at(const ConfidenceBand& band, double x) {
  const auto [lo, hi] = evaluate(band, x);
  return hi - lo;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// Calibration depends on the data only through the grid's prefix counts.
class CalibrationCache {
 public:
  CalibrationCache(CardinalityRule rule, CalibrationConfig config)
      : rule_(std::move(rule)), config_(std::move(config)) {}

  CriticalValues get(const Grid& grid, Execution exec) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(grid.prefix); it != cache_.end()) return it->second;
    }
    const IntervalFamily family(grid, rule_);
    auto cv = calibrate(family, grid, config_, exec);
    std::lock_guard lock(mutex_);
    return cache_.emplace(grid.prefix, std::move(cv)).first->second;
  }

 private:
  CardinalityRule rule_;
  CalibrationConfig config_;
  std::mutex mutex_;
  std::map<std::vector<std::size_t>, CriticalValues> cache_;
};

ConfidenceBand band_for(const Dataset& data, const CardinalityRule& rule, CalibrationCache& cache,
                        Execution exec) {
  const Grid grid = build_grid(data);
  const IntervalFamily family(grid, rule);
  const CriticalValues cv = cache.get(grid, exec);
  return compute_band(data, grid, family, cv);
}

CalibrationConfig config_of(const ScenarioSpec& spec) {
  return CalibrationConfig{spec.gamma, spec.alpha, spec.method};
}

}  // namespace

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::sqrt: return "sqrt";
    case CurveKind::linear: return "linear";
    case CurveKind::constant: return "constant";
    case CurveKind::step: return "step";
    case CurveKind::logistic: return "logistic";
  }
  return "unknown";
}

std::string to_string(NoiseKind kind) { return kind == NoiseKind::gaussian ? "gaussian" : "laplace"; }

std::string to_string(DesignKind kind) {
  return kind == DesignKind::equispaced ? "equispaced" : "uniform";
}

CurveKind parse_curve(const std::string& name) {
  for (auto k : {CurveKind::sqrt, CurveKind::linear, CurveKind::constant, CurveKind::step,
                 CurveKind::logistic}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown curve '" + name + "'");
}

NoiseKind parse_noise(const std::string& name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "laplace") return NoiseKind::laplace;
  throw std::invalid_argument("unknown noise law '" + name + "'");
}

DesignKind parse_design(const std::string& name) {
  if (name == "equispaced") return DesignKind::equispaced;
  if (name == "uniform") return DesignKind::uniform;
  throw std::invalid_argument("unknown design '" + name + "'");
}

void ScenarioSpec::validate() const {
  if (n < 1) throw std::invalid_argument("scenario: n must be >= 1");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw std::invalid_argument("scenario: need finite x_min < x_max");
  }
  if (!(noise_scale > 0.0) || !std::isfinite(noise_scale)) {
    throw std::invalid_argument("scenario: noise_scale must be positive");
  }
  if (replicates < 1) throw std::invalid_argument("scenario: replicates must be >= 1");
  config_of(*this).validate();
  if (scale_family && gamma < 0.5) {
    throw std::invalid_argument("scenario: the scale family needs gamma >= 0.5 to stay isotonic");
  }
}

double curve_value(const ScenarioSpec& spec, double x) {
  const double range = spec.x_max - spec.x_min;
  const double mid = 0.5 * (spec.x_min + spec.x_max);
  switch (spec.curve) {
    case CurveKind::sqrt: return std::sqrt(std::max(0.0, x - spec.x_min));
    case CurveKind::linear: return 5.0 * (x - spec.x_min) / range;
    case CurveKind::constant: return 0.0;
    case CurveKind::step: return x < mid ? 0.0 : 2.0;
    case CurveKind::logistic: return 4.0 / (1.0 + std::exp(-(x - mid) / (range / 12.0)));
  }
  return 0.0;
}

double true_quantile(const ScenarioSpec& spec, double x) {
  return curve_value(spec, x) + noise_scale_at(spec, x) * noise_quantile(spec.noise, spec.gamma);
}

Dataset generate_data(const ScenarioSpec& spec, std::uint64_t replicate) {
  CounterRng rng(spec.seed, replicate);
  const double range = spec.x_max - spec.x_min;
  std::vector<Observation> pairs(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double x = spec.design == DesignKind::equispaced
                         ? spec.x_min + range * (static_cast<double>(i) + 0.5) / static_cast<double>(spec.n)
                         : spec.x_min + range * rng.uniform_open();
    const double eps = noise_quantile(spec.noise, rng.uniform_open());
    pairs[i] = {x, curve_value(spec, x) + noise_scale_at(spec, x) * eps};
  }
  return Dataset(std::move(pairs));
}

ConfidenceBand run_pipeline(const Dataset& data, const CardinalityRule& rule,
                            const CalibrationConfig& config, Execution exec) {
  const Grid grid = build_grid(data);
  const IntervalFamily family(grid, rule);
  const CriticalValues cv = calibrate(family, grid, config, exec);
  ConfidenceBand band = compute_band(data, grid, family, cv);
  band.meta.gamma = config.gamma;
  band.meta.alpha = config.alpha;
  band.meta.family = to_string(rule.kind);
  band.meta.cap = to_string(rule.cap);
  band.meta.method = method_name(config.method);
  if (const auto* mc = std::get_if<MonteCarlo>(&config.method)) {
    band.meta.reps = mc->reps;
    band.meta.seed = mc->seed;
  }
  return band;
}

CoverageReport run_coverage(const ScenarioSpec& spec, Execution exec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  CalibrationCache cache(spec.rule, config_of(spec));
  const double center = 0.5 * (spec.x_min + spec.x_max);

  const auto reps = static_cast<std::int64_t>(spec.replicates);
  std::vector<char> covered(spec.replicates, 0);
  std::vector<double> central(spec.replicates, 0.0);
  std::vector<double> finite_width(spec.replicates, kNaN);
  double kappa = 0.0;

  auto one = [&](std::int64_t r, Execution inner) {
    const auto idx = static_cast<std::size_t>(r);
    const Dataset data = generate_data(spec, static_cast<std::uint64_t>(r));
    const ConfidenceBand band = band_for(data, spec.rule, cache, inner);
    bool ok = true;
    double sum = 0.0;
    std::size_t finite = 0;
    for (std::size_t j = 0; j < band.grid.z.size(); ++j) {
      const double q = true_quantile(spec, band.grid.z[j]);
      ok = ok && band.lower[j] <= q && q <= band.upper[j];
      const double w = band.upper[j] - band.lower[j];
      if (std::isfinite(w)) {
        sum += w;
        ++finite;
      }
    }
    covered[idx] = ok ? 1 : 0;
    central[idx] = width_at(band, center);
    if (finite > 0) finite_width[idx] = sum / static_cast<double>(finite);
    if (r == 0) kappa = band.meta.kappa;
  };

  if (exec == Execution::serial) {
    for (std::int64_t r = 0; r < reps; ++r) one(r, Execution::serial);
  } else {
    // Calibrate replicate 0 with the parallel kernel; the remaining
    // replicates usually hit the cache.
    one(0, Execution::parallel);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 1; r < reps; ++r) one(r, Execution::serial);
  }

  CoverageReport report;
  report.spec = spec;
  for (char c : covered) report.covered += static_cast<std::uint64_t>(c);
  const double rr = static_cast<double>(spec.replicates);
  report.coverage = static_cast<double>(report.covered) / rr;
  report.standard_error = std::sqrt(report.coverage * (1.0 - report.coverage) / rr);
  report.kappa = kappa;
  report.median_central_width = median(central);
  double sum = 0.0;
  std::size_t count = 0;
  for (double w : finite_width) {
    if (!std::isnan(w)) {
      sum += w;
      ++count;
    }
  }
  report.mean_finite_width = count > 0 ? sum / static_cast<double>(count) : kNaN;
  report.runtime_ms = elapsed_ms(start);
  return report;
}

double crossing_window(const ConfidenceBand& band, double level) {
  const auto& z = band.grid.z;
  const std::size_t nd = z.size();
  // U >= level from the first such grid point on; L <= level up to the last one.
  std::size_t a = 0;
  while (a < nd && band.upper[a] < level) ++a;
  std::size_t b = nd;
  while (b > 0 && band.lower[b - 1] > level) --b;
  if (a >= nd || b == 0 || b - 1 < a) return 0.0;
  return z[b - 1] - z[a];
}

RateReport run_rate_diagnostic(const ScenarioSpec& spec, const std::vector<std::size_t>& ns,
                               Execution exec) {
  if (ns.empty()) throw std::invalid_argument("rate diagnostic: no sample sizes");
  const auto start = std::chrono::steady_clock::now();
  RateReport report;
  report.spec = spec;
  const double range = spec.x_max - spec.x_min;
  const double center = spec.x_min + 0.5 * range;
  const double left_edge = spec.x_min + 0.1 * range;
  const double right_edge = spec.x_min + 0.9 * range;
  const double level =
      0.5 * (true_quantile(spec, std::nextafter(center, -kInf)) + true_quantile(spec, center));

  for (std::size_t n : ns) {
    ScenarioSpec s = spec;
    s.n = n;
    s.validate();
    CalibrationCache cache(s.rule, config_of(s));
    const auto reps = static_cast<std::int64_t>(s.replicates);
    std::vector<double> central(s.replicates), edge(s.replicates), window(s.replicates);
    auto one = [&](std::int64_t r, Execution inner) {
      const auto idx = static_cast<std::size_t>(r);
      const ConfidenceBand band = band_for(generate_data(s, static_cast<std::uint64_t>(r)), s.rule, cache, inner);
      central[idx] = width_at(band, center);
      edge[idx] = 0.5 * (width_at(band, left_edge) + width_at(band, right_edge));
      window[idx] = crossing_window(band, level);
    };
    if (exec == Execution::serial) {
      for (std::int64_t r = 0; r < reps; ++r) one(r, Execution::serial);
    } else {
      one(0, Execution::parallel);
#pragma omp parallel for schedule(dynamic)
      for (std::int64_t r = 1; r < reps; ++r) one(r, Execution::serial);
    }
    RateRow row;
    row.n = n;
    row.median_central_width = median(central);
    row.median_edge_width = median(edge);
    row.median_crossing_window = spec.curve == CurveKind::step ? median(window) : kNaN;
    report.rows.push_back(row);
  }

  // Least-squares slope over rows with a finite positive central width.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (const auto& row : report.rows) {
    if (!(row.median_central_width > 0.0) || !std::isfinite(row.median_central_width)) continue;
    const double nn = static_cast<double>(row.n);
    const double x = std::log(std::log(nn) / nn);
    const double y = std::log(row.median_central_width);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  report.log_width_slope = k >= 2 && denom != 0.0 ? (kk * sxy - sx * sy) / denom : kNaN;
  report.runtime_ms = elapsed_ms(start);
  return report;
}

}  // namespace isoband
