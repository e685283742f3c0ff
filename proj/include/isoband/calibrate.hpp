#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isoband/design.hpp"
#include "isoband/execution.hpp"

namespace isoband {

struct Bonferroni {};

struct MonteCarlo {
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
};

struct FixedKappa {
  double kappa = 1.0;
};

using KappaMethod = std::variant<Bonferroni, MonteCarlo, FixedKappa>;

std::string method_name(const KappaMethod& method);

struct CalibrationConfig {
  double gamma = 0.5;
  double alpha = 0.05;
  KappaMethod method = Bonferroni{};

  /// Throws std::invalid_argument on gamma/alpha outside (0, 1), reps < 1 or
  /// a fixed kappa outside (0, 1].
  void validate() const;
};

/// lower[m] = F_{m,gamma}^{-1}(kappa), upper[m] = F_{m,1-gamma}^{-1}(kappa)
/// for m = 1..n; index 0 holds 0.
struct CriticalValues {
  double kappa = 1.0;
  std::vector<std::size_t> lower;
  std::vector<std::size_t> upper;
};

CriticalValues critical_values(double kappa, double gamma, std::size_t n);

/// Bonferroni upper bound on the probability that some family member
/// violates its critical count, for the critical values implied by kappa.
double bonferroni_bound(const IntervalFamily& family, double gamma, double kappa);

/// Largest kappa whose Bonferroni bound is at most alpha. The bisection runs
/// on log kappa and the result is snapped to the exact jump point of the
/// (piecewise constant) bound.
double kappa_bonferroni(const IntervalFamily& family, double gamma, double alpha);

/// Minimum over family members of min(F_{N,gamma}(T_l), F_{N,1-gamma}(T_u))
/// for one Bernoulli vector xi in observation order. Precomputes the CDF
/// tables once; evaluate() is O(family size).
class UiStatistic {
 public:
  UiStatistic(const IntervalFamily& family, const Grid& grid, double gamma);

  double evaluate(std::span<const std::uint8_t> xi, std::vector<std::uint32_t>& scratch) const;
  std::size_t observations() const { return n_; }

 private:
  struct Member {
    std::uint32_t begin;
    std::uint32_t end;
    std::uint32_t lower_offset;
    std::uint32_t upper_offset;
  };
  std::size_t n_;
  std::vector<Member> members_;
  std::vector<double> lower_tables_;
  std::vector<double> upper_tables_;
};

double ui_statistic(std::span<const std::uint8_t> xi, const IntervalFamily& family,
                    const Grid& grid, double gamma);

/// Orientation of the Bernoulli stream. `mirrored` draws the forward vector
/// for success probability 1 - gamma and maps xi'_i = 1 - xi_{n+1-i}, which
/// makes the statistic of the reflected problem (reversed grid, 1 - gamma)
/// identical replicate by replicate.
enum class StreamOrientation { forward, mirrored };

/// Bernoulli(gamma) vector for replicate `replicate` of stream `seed`.
void draw_bernoulli(std::uint64_t seed, std::uint64_t replicate, double gamma,
                    StreamOrientation orientation, std::span<std::uint8_t> out);

/// The simulated union-intersection statistics, one per replicate, in
/// replicate order. Serial and parallel execution give identical vectors.
std::vector<double> simulate_ui_statistics(const IntervalFamily& family, const Grid& grid,
                                           double gamma, const MonteCarlo& mc,
                                           Execution exec = Execution::parallel,
                                           StreamOrientation orientation = StreamOrientation::forward);

/// The ceil(alpha (R + 1))-th order statistic, clamped to [1, R].
double empirical_quantile(std::vector<double> sample, double alpha);

double kappa_monte_carlo(const IntervalFamily& family, const Grid& grid,
                         const CalibrationConfig& config, Execution exec = Execution::parallel,
                         StreamOrientation orientation = StreamOrientation::forward);

/// Dispatches on config.method and fills the critical-value arrays for
/// m = 1..grid.observations().
CriticalValues calibrate(const IntervalFamily& family, const Grid& grid,
                         const CalibrationConfig& config, Execution exec = Execution::parallel);

}  // namespace isoband
