#include "isoband/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "isoband/binomial.hpp"
#include "isoband/rng.hpp"

namespace isoband {

namespace {

struct TailTerm {
  std::int64_t m;
  double weight;
};

std::vector<TailTerm> tail_terms(const IntervalFamily& family) {
  std::vector<TailTerm> terms;
  const auto h = family.multiplicities();
  for (std::size_t m = 1; m < h.size(); ++m) {
    if (h[m] > 0) terms.push_back({static_cast<std::int64_t>(m), static_cast<double>(h[m])});
  }
  return terms;
}

double bound_from_terms(const std::vector<TailTerm>& terms, double gamma, double kappa) {
  double total = 0.0;
  for (const auto& t : terms) {
    const BinomialParams lower(t.m, gamma);
    const BinomialParams upper(t.m, 1.0 - gamma);
    const std::int64_t cl = binom_quantile(lower, kappa);
    const std::int64_t cu = binom_quantile(upper, kappa);
    total += t.weight * (binom_cdf(lower, cl - 1) + binom_cdf(upper, cu - 1));
  }
  return total;
}

// Smallest CDF value F_{m,p}(k) >= kappa over the family's (m, p) pairs; the
// bound is constant on (previous jump, this jump].
double jump_at_or_above(const std::vector<TailTerm>& terms, double gamma, double kappa) {
  double best = 1.0;
  for (const auto& t : terms) {
    for (double p : {gamma, 1.0 - gamma}) {
      const BinomialParams params(t.m, p);
      best = std::min(best, binom_cdf(params, binom_quantile(params, kappa)));
    }
  }
  return best;
}

// Smallest CDF value strictly above kappa, or +inf if kappa is already 1.
double jump_above(const std::vector<TailTerm>& terms, double gamma, double kappa) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    for (double p : {gamma, 1.0 - gamma}) {
      const BinomialParams params(t.m, p);
      std::int64_t c = binom_quantile(params, kappa);
      double v = binom_cdf(params, c);
      while (v <= kappa && c < t.m) v = binom_cdf(params, ++c);
      if (v > kappa) best = std::min(best, v);
    }
  }
  return best;
}

void check_unit_open(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in (0, 1)");
  }
}

}  // namespace

std::string method_name(const KappaMethod& method) {
  if (std::holds_alternative<Bonferroni>(method)) return "bonferroni";
  if (std::holds_alternative<MonteCarlo>(method)) return "monte_carlo";
  return "fixed";
}

void CalibrationConfig::validate() const {
  check_unit_open(gamma, "gamma");
  check_unit_open(alpha, "alpha");
  if (const auto* mc = std::get_if<MonteCarlo>(&method); mc && mc->reps < 1) {
    throw std::invalid_argument("Monte Carlo replication count must be >= 1");
  }
  if (const auto* fixed = std::get_if<FixedKappa>(&method);
      fixed && !(fixed->kappa > 0.0 && fixed->kappa <= 1.0)) {
    throw std::invalid_argument("fixed kappa must lie in (0, 1]");
  }
}

CriticalValues critical_values(double kappa, double gamma, std::size_t n) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("kappa must lie in (0, 1]");
  CriticalValues cv;
  cv.kappa = kappa;
  cv.lower.assign(n + 1, 0);
  cv.upper.assign(n + 1, 0);
  for (std::size_t m = 1; m <= n; ++m) {
    const auto mm = static_cast<std::int64_t>(m);
    cv.lower[m] = static_cast<std::size_t>(binom_quantile(BinomialParams(mm, gamma), kappa));
    cv.upper[m] = static_cast<std::size_t>(binom_quantile(BinomialParams(mm, 1.0 - gamma), kappa));
  }
  return cv;
}

double bonferroni_bound(const IntervalFamily& family, double gamma, double kappa) {
  return bound_from_terms(tail_terms(family), gamma, kappa);
}

double kappa_bonferroni(const IntervalFamily& family, double gamma, double alpha) {
  const auto terms = tail_terms(family);
  if (bound_from_terms(terms, gamma, 1.0) <= alpha) return 1.0;

  const double nd = static_cast<double>(family.n_distinct());
  double lo = alpha / (nd * (nd + 1.0)) * 1e-2;
  double hi = 1.0;
  if (bound_from_terms(terms, gamma, lo) > alpha) {
    throw std::logic_error("kappa_bonferroni: lower end of the search interval is infeasible");
  }
  while (hi > lo * (1.0 + 1e-7)) {
    const double mid = std::sqrt(lo * hi);
    if (bound_from_terms(terms, gamma, mid) <= alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  double kappa = jump_at_or_above(terms, gamma, lo);
  for (;;) {
    const double next = jump_above(terms, gamma, kappa);
    if (!(next <= 1.0) || bound_from_terms(terms, gamma, next) > alpha) break;
    kappa = next;
  }
  return kappa;
}

UiStatistic::UiStatistic(const IntervalFamily& family, const Grid& grid, double gamma)
    : n_(grid.observations()) {
  std::vector<std::uint32_t> lower_offset(n_ + 1, 0);
  std::vector<std::uint32_t> upper_offset(n_ + 1, 0);
  const auto h = family.multiplicities();
  for (std::size_t m = 1; m < h.size(); ++m) {
    if (h[m] == 0) continue;
    const auto mm = static_cast<std::int64_t>(m);
    lower_offset[m] = static_cast<std::uint32_t>(lower_tables_.size());
    upper_offset[m] = static_cast<std::uint32_t>(upper_tables_.size());
    const auto lt = binom_cdf_table(BinomialParams(mm, gamma));
    const auto ut = binom_cdf_table(BinomialParams(mm, 1.0 - gamma));
    lower_tables_.insert(lower_tables_.end(), lt.begin(), lt.end());
    upper_tables_.insert(upper_tables_.end(), ut.begin(), ut.end());
  }
  members_.reserve(family.size());
  for (const auto& b : family.members()) {
    members_.push_back({static_cast<std::uint32_t>(grid.prefix[b.first]),
                        static_cast<std::uint32_t>(grid.prefix[b.last + 1]),
                        lower_offset[b.count], upper_offset[b.count]});
  }
}

double UiStatistic::evaluate(std::span<const std::uint8_t> xi,
                             std::vector<std::uint32_t>& scratch) const {
  scratch.resize(n_ + 1);
  scratch[0] = 0;
  for (std::size_t i = 0; i < n_; ++i) scratch[i + 1] = scratch[i] + xi[i];
  double stat = 1.0;
  for (const auto& b : members_) {
    const std::uint32_t m = b.end - b.begin;
    const std::uint32_t successes = scratch[b.end] - scratch[b.begin];
    const double pl = lower_tables_[b.lower_offset + successes];
    const double pu = upper_tables_[b.upper_offset + (m - successes)];
    stat = std::min(stat, std::min(pl, pu));
  }
  return stat;
}

double ui_statistic(std::span<const std::uint8_t> xi, const IntervalFamily& family,
                    const Grid& grid, double gamma) {
  if (xi.size() != grid.observations()) {
    throw std::invalid_argument("ui_statistic: xi length does not match the data");
  }
  std::vector<std::uint32_t> scratch;
  return UiStatistic(family, grid, gamma).evaluate(xi, scratch);
}

void draw_bernoulli(std::uint64_t seed, std::uint64_t replicate, double gamma,
                    StreamOrientation orientation, std::span<std::uint8_t> out) {
  CounterRng rng(seed, replicate);
  const std::size_t n = out.size();
  if (orientation == StreamOrientation::forward) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.uniform() <= gamma ? 1 : 0;
    return;
  }
  const double forward_gamma = 1.0 - gamma;
  for (std::size_t i = 0; i < n; ++i) {
    out[n - 1 - i] = rng.uniform() <= forward_gamma ? 0 : 1;
  }
}

std::vector<double> simulate_ui_statistics(const IntervalFamily& family, const Grid& grid,
                                           double gamma, const MonteCarlo& mc, Execution exec,
                                           StreamOrientation orientation) {
  if (mc.reps < 1) throw std::invalid_argument("Monte Carlo replication count must be >= 1");
  const UiStatistic stat(family, grid, gamma);
  const std::size_t n = grid.observations();
  const auto reps = static_cast<std::int64_t>(mc.reps);
  std::vector<double> out(mc.reps);

  if (exec == Execution::serial) {
    std::vector<std::uint8_t> xi(n);
    std::vector<std::uint32_t> scratch;
    for (std::int64_t r = 0; r < reps; ++r) {
      draw_bernoulli(mc.seed, static_cast<std::uint64_t>(r), gamma, orientation, xi);
      out[static_cast<std::size_t>(r)] = stat.evaluate(xi, scratch);
    }
    return out;
  }

#pragma omp parallel
  {
    std::vector<std::uint8_t> xi(n);
    std::vector<std::uint32_t> scratch;
#pragma omp for schedule(static)
    for (std::int64_t r = 0; r < reps; ++r) {
      draw_bernoulli(mc.seed, static_cast<std::uint64_t>(r), gamma, orientation, xi);
      out[static_cast<std::size_t>(r)] = stat.evaluate(xi, scratch);
    }
  }
  return out;
}

double empirical_quantile(std::vector<double> sample, double alpha) {
  if (sample.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  const double r = static_cast<double>(sample.size());
  const double target = alpha * (r + 1.0);
  auto rank = static_cast<std::int64_t>(std::ceil(target - 1e-9 * target));
  rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(sample.size()));
  auto nth = sample.begin() + (rank - 1);
  std::nth_element(sample.begin(), nth, sample.end());
  return *nth;
}

double kappa_monte_carlo(const IntervalFamily& family, const Grid& grid,
                         const CalibrationConfig& config, Execution exec,
                         StreamOrientation orientation) {
  const auto* mc = std::get_if<MonteCarlo>(&config.method);
  if (mc == nullptr) throw std::invalid_argument("kappa_monte_carlo: method is not Monte Carlo");
  config.validate();
  return empirical_quantile(
      simulate_ui_statistics(family, grid, config.gamma, *mc, exec, orientation), config.alpha);
}

CriticalValues calibrate(const IntervalFamily& family, const Grid& grid,
                         const CalibrationConfig& config, Execution exec) {
  config.validate();
  double kappa = 1.0;
  if (std::holds_alternative<Bonferroni>(config.method)) {
    kappa = kappa_bonferroni(family, config.gamma, config.alpha);
  } else if (std::holds_alternative<MonteCarlo>(config.method)) {
    kappa = kappa_monte_carlo(family, grid, config, exec);
  } else {
    kappa = std::get<FixedKappa>(config.method).kappa;
  }
  return critical_values(kappa, config.gamma, grid.observations());
}

}  // namespace isoband
