#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "isoband/calibrate.hpp"
#include "isoband/design.hpp"

namespace isoband {

struct BandMeta {
  double gamma = 0.5;
  double alpha = 0.05;
  double kappa = 1.0;
  std::string family;
  std::string cap;
  std::string method;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
};

/// Step-function band on the distinct covariate grid. lower[j] = L(z_j) is
/// -inf or an observed response; upper[j] = U(z_j) is +inf or an observed
/// response. Both are nondecreasing.
struct ConfidenceBand {
  Grid grid;
  std::vector<double> lower;
  std::vector<double> upper;
  BandMeta meta;

  /// True when L > U somewhere, which happens only if monotonicity is
  /// badly violated by the data.
  bool crosses() const;
};

/// Direct evaluation of the sup/inf of order statistics over family members.
/// O(#family * n log n); kept as the reference for the sweep.
ConfidenceBand naive_band(const Dataset& data, const Grid& grid, const IntervalFamily& family,
                          const CriticalValues& cv);

struct SweepStats {
  std::uint64_t inner_steps = 0;  // grid points visited by the inner scan
  std::uint64_t restarts = 0;
};

/// Lower bounds L(z_j) by the quadratic sweep: the level r only moves up,
/// and each (k, r) pair costs one scan of at most k grid points.
std::vector<double> compute_lower(const Dataset& data, const Grid& grid,
                                  const IntervalFamily& family, const CriticalValues& cv,
                                  SweepStats* stats = nullptr);

/// Upper bounds via the lower sweep on the point-reflected data with the
/// upper critical counts.
std::vector<double> compute_upper(const Dataset& data, const Grid& grid,
                                  const IntervalFamily& family, const CriticalValues& cv,
                                  SweepStats* stats = nullptr);

ConfidenceBand compute_band(const Dataset& data, const Grid& grid, const IntervalFamily& family,
                            const CriticalValues& cv, SweepStats* stats = nullptr);

/// (L(x), U(x)): L is right-continuous and -inf left of z_1, U is
/// left-continuous and +inf right of the last grid point.
std::pair<double, double> evaluate(const ConfidenceBand& band, double x);

}  // namespace isoband
