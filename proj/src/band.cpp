#include "isoband/band.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>

namespace isoband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const Dataset& data, const Grid& grid, const IntervalFamily& family,
                  const CriticalValues& cv) {
  if (grid.observations() != data.size() || family.n_distinct() != grid.distinct()) {
    throw std::invalid_argument("band: dataset, grid and family do not match");
  }
  if (cv.lower.size() <= data.size() || cv.upper.size() <= data.size()) {
    throw std::invalid_argument("band: critical values do not cover all counts");
  }
}

// Core of the lower sweep. `ys` are the responses in (x, y) order, so each
// grid group is sorted ascending. `member(first, last)` tests family
// membership on this grid.
template <typename MemberFn>
std::vector<double> lower_sweep(std::span<const double> ys, const std::vector<std::size_t>& prefix,
                                MemberFn member, const std::vector<std::size_t>& crit,
                                SweepStats* stats) {
  const std::size_t nd = prefix.size() - 1;
  std::vector<double> out(nd);
  double r = -kInf;
  for (std::size_t k = 0; k < nd; ++k) {
    std::size_t s = 0;
    double r_new = kInf;
    std::size_t j = k + 1;
    while (j > 0) {
      --j;
      const auto group_begin = ys.begin() + static_cast<std::ptrdiff_t>(prefix[j]);
      const auto group_end = ys.begin() + static_cast<std::ptrdiff_t>(prefix[j + 1]);
      const auto above = std::upper_bound(group_begin, group_end, r);
      s += static_cast<std::size_t>(above - group_begin);
      if (above != group_end) r_new = std::min(r_new, *above);
      if (stats) ++stats->inner_steps;

      if (!member(j, k)) continue;
      const std::size_t c = crit[prefix[k + 1] - prefix[j]];
      if (c > 0 && s < c) {
        r = r_new;
        j = k + 1;
        s = 0;
        r_new = kInf;
        if (stats) ++stats->restarts;
      }
    }
    out[k] = r;
  }
  return out;
}

std::vector<double> responses(const Dataset& data) {
  std::vector<double> ys;
  ys.reserve(data.size());
  for (const auto& p : data.pairs()) ys.push_back(p.y);
  return ys;
}

}  // namespace

bool ConfidenceBand::crosses() const {
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (lower[j] > upper[j]) return true;
  }
  return false;
}

ConfidenceBand naive_band(const Dataset& data, const Grid& grid, const IntervalFamily& family,
                          const CriticalValues& cv) {
  check_inputs(data, grid, family, cv);
  const std::size_t nd = grid.distinct();
  ConfidenceBand band{grid, std::vector<double>(nd, -kInf), std::vector<double>(nd, kInf), {}};
  band.meta.kappa = cv.kappa;
  const auto ys = responses(data);
  std::vector<double> local;
  for (const auto& b : family.members()) {
    local.assign(ys.begin() + static_cast<std::ptrdiff_t>(grid.prefix[b.first]),
                 ys.begin() + static_cast<std::ptrdiff_t>(grid.prefix[b.last + 1]));
    std::sort(local.begin(), local.end());
    const std::size_t m = local.size();
    const std::size_t cl = cv.lower[m];
    const std::size_t cu = cv.upper[m];
    const double lo = cl == 0 ? -kInf : local[cl - 1];
    const double hi = cu == 0 ? kInf : local[m - cu];
    for (std::size_t j = b.last; j < nd; ++j) band.lower[j] = std::max(band.lower[j], lo);
    for (std::size_t j = 0; j <= b.first; ++j) band.upper[j] = std::min(band.upper[j], hi);
  }
  return band;
}

std::vector<double> compute_lower(const Dataset& data, const Grid& grid,
                                  const IntervalFamily& family, const CriticalValues& cv,
                                  SweepStats* stats) {
  check_inputs(data, grid, family, cv);
  const auto ys = responses(data);
  return lower_sweep(
      ys, grid.prefix, [&](std::size_t j, std::size_t k) { return family.contains(j, k); },
      cv.lower, stats);
}

std::vector<double> compute_upper(const Dataset& data, const Grid& grid,
                                  const IntervalFamily& family, const CriticalValues& cv,
                                  SweepStats* stats) {
  check_inputs(data, grid, family, cv);
  const Dataset mirror = data.reflected();
  const Grid mirror_grid = build_grid(mirror);
  const std::size_t last = grid.distinct() - 1;
  const auto ys = responses(mirror);
  auto mirrored = lower_sweep(
      ys, mirror_grid.prefix,
      [&](std::size_t j, std::size_t k) { return family.contains(last - k, last - j); },
      cv.upper, stats);
  std::reverse(mirrored.begin(), mirrored.end());
  for (auto& v : mirrored) v = -v;
  return mirrored;
}

ConfidenceBand compute_band(const Dataset& data, const Grid& grid, const IntervalFamily& family,
                            const CriticalValues& cv, SweepStats* stats) {
  ConfidenceBand band;
  band.grid = grid;
  band.lower = compute_lower(data, grid, family, cv, stats);
  band.upper = compute_upper(data, grid, family, cv, stats);
  band.meta.kappa = cv.kappa;
  return band;
}

std::pair<double, double> evaluate(const ConfidenceBand& band, double x) {
  const auto& z = band.grid.z;
  // L: last z_j <= x.
  const auto le = std::upper_bound(z.begin(), z.end(), x);
  const double lower = le == z.begin() ? -kInf : band.lower[static_cast<std::size_t>(le - z.begin() - 1)];
  // U: first z_j >= x.
  const auto ge = std::lower_bound(z.begin(), z.end(), x);
  const double upper = ge == z.end() ? kInf : band.upper[static_cast<std::size_t>(ge - z.begin())];
  return {lower, upper};
}

}  // namespace isoband
