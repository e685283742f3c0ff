#pragma once

#include <span>
#include <vector>

#include "isoband/band.hpp"
#include "isoband/execution.hpp"

namespace isoband {

/// Candidate inflection points. -inf stands for "concave everywhere", +inf
/// for "convex everywhere".
struct InflectionGrid {
  std::vector<double> points;

  /// Midpoints between consecutive grid values plus both sentinels.
  static InflectionGrid midpoints(const Grid& grid);
};

struct Envelope {
  std::vector<double> lower;
  std::vector<double> upper;
  bool feasible = false;
};

/// Pointwise inf/sup at the grid points over continuous nondecreasing
/// functions that are convex on (-inf, mu], concave on [mu, inf) and satisfy
/// lower[j] <= S(z[j]) <= upper[j]. Infinite bounds impose nothing.
Envelope envelope_at_mu(std::span<const double> z, std::span<const double> lower,
                        std::span<const double> upper, double mu);

Envelope envelope_at_mu(const ConfidenceBand& band, double mu);

/// Envelope of a single shape-constrained piece: nondecreasing and concave
/// (or convex) through boxes at the knots t. Exposed for testing.
Envelope concave_piece_envelope(std::span<const double> t, std::span<const double> lower,
                                std::span<const double> upper);
Envelope convex_piece_envelope(std::span<const double> t, std::span<const double> lower,
                               std::span<const double> upper);

struct MuFeasibility {
  double mu;
  bool feasible;
};

struct SShapeRefinement {
  std::vector<double> lower_refined;
  std::vector<double> upper_refined;
  std::vector<MuFeasibility> feasible_mu;
  bool any_feasible = false;
};

/// Min of the per-mu lower envelopes and max of the per-mu upper envelopes
/// over the feasible mu. When no mu is feasible the arrays hold the
/// empty-set values (+inf lower, -inf upper).
SShapeRefinement refine(const ConfidenceBand& band, const InflectionGrid& mu_grid,
                        Execution exec = Execution::parallel);

}  // namespace isoband
