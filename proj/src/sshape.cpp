#include "isoband/sshape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace isoband {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double slack(double a, double b) {
  double scale = 1.0;
  if (std::isfinite(a)) scale = std::max(scale, std::abs(a));
  if (std::isfinite(b)) scale = std::max(scale, std::abs(b));
  return 1e-9 * scale;
}

struct Point {
  double t;
  double y;
};

double slope(const Point& a, const Point& b) { return (b.y - a.y) / (b.t - a.t); }

// b lies strictly above the segment a-c, with a.t < b.t < c.t.
bool above(const Point& a, const Point& b, const Point& c) {
  return (b.y - a.y) * (c.t - a.t) > (c.y - a.y) * (b.t - a.t);
}

// Upper hull vertices in increasing t. Callers append points in increasing
// t (left hull) or decreasing t (right hull, stored reversed).
class LeftHull {
 public:
  void push(const Point& p) {
    while (v_.size() >= 2 && !above(v_[v_.size() - 2], v_.back(), p)) v_.pop_back();
    v_.push_back(p);
  }
  bool empty() const { return v_.empty(); }

  // Minimum slope from a hull vertex to q, where q lies right of every vertex.
  double min_slope_to(const Point& q) const {
    std::size_t lo = 0;
    std::size_t hi = v_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (slope(v_[mid], v_[mid + 1]) > slope(v_[mid], q)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return slope(v_[lo], q);
  }

 private:
  std::vector<Point> v_;
};

class RightHull {
 public:
  void push(const Point& p) {
    while (v_.size() >= 2 && !above(p, v_.back(), v_[v_.size() - 2])) v_.pop_back();
    v_.push_back(p);
  }
  bool empty() const { return v_.empty(); }

  // Maximum slope from q to a hull vertex, where q lies left of every vertex.
  double max_slope_from(const Point& q) const {
    const std::size_t h = v_.size();
    auto at = [&](std::size_t a) -> const Point& { return v_[h - 1 - a]; };
    std::size_t lo = 0;
    std::size_t hi = h - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (slope(at(mid), at(mid + 1)) > slope(q, at(mid))) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return slope(q, at(lo));
  }

 private:
  std::vector<Point> v_;
};

// Li Chao tree for the lower envelope of lines over a fixed sorted abscissa set.
class MinLineTree {
 public:
  explicit MinLineTree(std::span<const double> xs) : xs_(xs), nodes_(4 * std::max<std::size_t>(xs.size(), 1)) {}

  void insert(const Point& through, double s) {
    if (!xs_.empty()) insert({through, s, true}, 1, 0, xs_.size() - 1);
  }

  double query(std::size_t i) const {
    double best = kInf;
    std::size_t node = 1;
    std::size_t lo = 0;
    std::size_t hi = xs_.size() - 1;
    for (;;) {
      if (nodes_[node].used) best = std::min(best, nodes_[node].at(xs_[i]));
      if (lo == hi) break;
      const std::size_t mid = (lo + hi) / 2;
      if (i <= mid) {
        node = 2 * node;
        hi = mid;
      } else {
        node = 2 * node + 1;
        lo = mid + 1;
      }
    }
    return best;
  }

 private:
  struct Line {
    Point p;
    double s = 0.0;
    bool used = false;
    double at(double x) const { return p.y + s * (x - p.t); }
  };

  void insert(Line line, std::size_t node, std::size_t lo, std::size_t hi) {
    for (;;) {
      Line& cur = nodes_[node];
      if (!cur.used) {
        cur = line;
        return;
      }
      const std::size_t mid = (lo + hi) / 2;
      const bool left_better = line.at(xs_[lo]) < cur.at(xs_[lo]);
      const bool mid_better = line.at(xs_[mid]) < cur.at(xs_[mid]);
      if (mid_better) std::swap(cur, line);
      if (lo == hi) return;
      if (left_better != mid_better) {
        node = 2 * node;
        hi = mid;
      } else {
        node = 2 * node + 1;
        lo = mid + 1;
      }
    }
  }

  std::span<const double> xs_;
  std::vector<Line> nodes_;
};

void check_sizes(std::span<const double> t, std::span<const double> lower,
                 std::span<const double> upper) {
  if (t.size() != lower.size() || t.size() != upper.size()) {
    throw std::invalid_argument("envelope: knots and bounds differ in length");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("envelope: knots must be increasing");
  }
}

// Least concave nondecreasing majorant of the finite lower bounds at the knots.
std::vector<double> concave_minorant_bound(std::span<const double> t, std::span<const double> lo) {
  const std::size_t m = t.size();
  std::vector<double> out(m, -kInf);
  std::size_t first = m;
  std::size_t peak = m;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(lo[i])) continue;
    if (first == m) first = i;
    if (peak == m || lo[i] > lo[peak]) peak = i;
  }
  if (first == m) return out;

  std::vector<Point> hull;
  for (std::size_t i = first; i <= peak; ++i) {
    if (!std::isfinite(lo[i])) continue;
    const Point p{t[i], lo[i]};
    while (hull.size() >= 2 && !above(hull[hull.size() - 2], hull.back(), p)) hull.pop_back();
    hull.push_back(p);
  }
  std::size_t seg = 0;
  for (std::size_t i = first; i <= peak; ++i) {
    while (seg + 1 < hull.size() && hull[seg + 1].t < t[i]) ++seg;
    if (seg + 1 < hull.size()) {
      const Point& a = hull[seg];
      const Point& b = hull[seg + 1];
      out[i] = a.y + (b.y - a.y) * ((t[i] - a.t) / (b.t - a.t));
    } else {
      out[i] = hull.back().y;
    }
    if (std::isfinite(lo[i])) out[i] = std::max(out[i], lo[i]);
  }
  for (std::size_t i = peak + 1; i < m; ++i) out[i] = lo[peak];
  return out;
}

std::vector<double> negate_reverse(std::span<const double> v) {
  std::vector<double> out(v.rbegin(), v.rend());
  for (auto& x : out) x = -x;
  return out;
}

}  // namespace

InflectionGrid InflectionGrid::midpoints(const Grid& grid) {
  InflectionGrid g;
  g.points.push_back(-kInf);
  for (std::size_t j = 0; j + 1 < grid.z.size(); ++j) {
    g.points.push_back(0.5 * (grid.z[j] + grid.z[j + 1]));
  }
  g.points.push_back(kInf);
  return g;
}

Envelope concave_piece_envelope(std::span<const double> t, std::span<const double> lower,
                                std::span<const double> upper) {
  check_sizes(t, lower, upper);
  const std::size_t m = t.size();
  Envelope env;
  env.lower = concave_minorant_bound(t, lower);
  for (std::size_t i = 0; i < m; ++i) {
    if (env.lower[i] > upper[i] + slack(env.lower[i], upper[i])) {
      env.upper.assign(m, kInf);
      env.feasible = false;
      return env;
    }
  }
  env.feasible = true;

  // Monotone part: the suffix minimum of the upper bounds.
  env.upper.assign(m, kInf);
  double run = kInf;
  for (std::size_t i = m; i-- > 0;) {
    run = std::min(run, upper[i]);
    env.upper[i] = run;
  }

  // Concavity through an upper bound at an earlier knot: a line through
  // (t_i, upper_i) whose slope is the smallest one reaching it from a lower
  // point further left.
  {
    LeftHull hull;
    MinLineTree lines(t);
    for (std::size_t k = 0; k < m; ++k) {
      env.upper[k] = std::min(env.upper[k], lines.query(k));
      if (std::isfinite(upper[k]) && !hull.empty()) {
        const Point q{t[k], upper[k]};
        lines.insert(q, hull.min_slope_to(q));
      }
      if (std::isfinite(lower[k])) hull.push({t[k], lower[k]});
    }
  }

  // Concavity through an upper bound at a later knot, mirrored.
  {
    RightHull hull;
    std::vector<double> neg_t(t.rbegin(), t.rend());
    for (auto& x : neg_t) x = -x;
    MinLineTree lines(neg_t);
    for (std::size_t k = m; k-- > 0;) {
      env.upper[k] = std::min(env.upper[k], lines.query(m - 1 - k));
      if (std::isfinite(upper[k]) && !hull.empty()) {
        const Point q{t[k], upper[k]};
        const double s = hull.max_slope_from(q);
        lines.insert({-t[k], upper[k]}, -s);
      }
      if (std::isfinite(lower[k])) hull.push({t[k], lower[k]});
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (env.upper[i] < env.lower[i]) env.upper[i] = std::min(env.lower[i], upper[i]);
  }
  return env;
}

Envelope convex_piece_envelope(std::span<const double> t, std::span<const double> lower,
                               std::span<const double> upper) {
  check_sizes(t, lower, upper);
  const auto rt = negate_reverse(t);
  const auto rlo = negate_reverse(upper);
  const auto rhi = negate_reverse(lower);
  const Envelope r = concave_piece_envelope(rt, rlo, rhi);
  Envelope env;
  env.feasible = r.feasible;
  env.lower = negate_reverse(r.upper);
  env.upper = negate_reverse(r.lower);
  return env;
}

Envelope envelope_at_mu(std::span<const double> z, std::span<const double> lower,
                        std::span<const double> upper, double mu) {
  check_sizes(z, lower, upper);
  if (std::isnan(mu)) throw std::invalid_argument("envelope: inflection point is NaN");
  const std::size_t nd = z.size();
  if (nd == 0) return {{}, {}, true};
  if (mu <= z.front()) return concave_piece_envelope(z, lower, upper);
  if (mu >= z.back()) return convex_piece_envelope(z, lower, upper);

  // Split at mu; a grid point equal to mu is shared by both pieces.
  const auto split = static_cast<std::size_t>(std::lower_bound(z.begin(), z.end(), mu) - z.begin());
  const bool shared = z[split] == mu;
  const std::size_t right_begin = shared ? split + 1 : split;

  std::vector<double> lt(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(split));
  std::vector<double> llo(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(split));
  std::vector<double> lhi(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(split));
  std::vector<double> rt{mu};
  std::vector<double> rlo{-kInf};
  std::vector<double> rhi{kInf};
  rt.insert(rt.end(), z.begin() + static_cast<std::ptrdiff_t>(right_begin), z.end());
  rlo.insert(rlo.end(), lower.begin() + static_cast<std::ptrdiff_t>(right_begin), lower.end());
  rhi.insert(rhi.end(), upper.begin() + static_cast<std::ptrdiff_t>(right_begin), upper.end());
  lt.push_back(mu);
  llo.push_back(shared ? lower[split] : -kInf);
  lhi.push_back(shared ? upper[split] : kInf);
  if (shared) {
    rlo[0] = lower[split];
    rhi[0] = upper[split];
  }

  Envelope infeasible{std::vector<double>(nd, kInf), std::vector<double>(nd, -kInf), false};

  // Values at mu reachable by each piece alone, then by both together.
  const Envelope left0 = convex_piece_envelope(lt, llo, lhi);
  const Envelope right0 = concave_piece_envelope(rt, rlo, rhi);
  if (!left0.feasible || !right0.feasible) return infeasible;
  double knot_lo = std::max(left0.lower.back(), right0.lower.front());
  double knot_hi = std::min(left0.upper.back(), right0.upper.front());
  if (knot_lo > knot_hi + slack(knot_lo, knot_hi)) return infeasible;
  if (knot_lo > knot_hi) knot_lo = knot_hi = 0.5 * (knot_lo + knot_hi);

  llo.back() = rlo.front() = knot_lo;
  lhi.back() = rhi.front() = knot_hi;
  const Envelope left = convex_piece_envelope(lt, llo, lhi);
  const Envelope right = concave_piece_envelope(rt, rlo, rhi);
  if (!left.feasible || !right.feasible) return infeasible;

  Envelope env;
  env.feasible = true;
  env.lower.resize(nd);
  env.upper.resize(nd);
  for (std::size_t j = 0; j < split; ++j) {
    env.lower[j] = left.lower[j];
    env.upper[j] = left.upper[j];
  }
  if (shared) {
    env.lower[split] = std::max(left.lower.back(), right.lower.front());
    env.upper[split] = std::min(left.upper.back(), right.upper.front());
  }
  for (std::size_t j = right_begin; j < nd; ++j) {
    env.lower[j] = right.lower[j - right_begin + 1];
    env.upper[j] = right.upper[j - right_begin + 1];
  }
  return env;
}

Envelope envelope_at_mu(const ConfidenceBand& band, double mu) {
  return envelope_at_mu(band.grid.z, band.lower, band.upper, mu);
}

SShapeRefinement refine(const ConfidenceBand& band, const InflectionGrid& mu_grid, Execution exec) {
  const std::size_t nd = band.grid.z.size();
  if (band.lower.size() != nd || band.upper.size() != nd) {
    throw std::invalid_argument("refine: band arrays do not match the grid");
  }
  if (mu_grid.points.empty()) throw std::invalid_argument("refine: empty inflection grid");

  const auto count = static_cast<std::int64_t>(mu_grid.points.size());
  std::vector<char> ok(mu_grid.points.size(), 0);
  SShapeRefinement out;
  out.lower_refined.assign(nd, kInf);
  out.upper_refined.assign(nd, -kInf);

  auto accumulate = [&](std::vector<double>& lo, std::vector<double>& hi, std::int64_t i) {
    const Envelope env = envelope_at_mu(band, mu_grid.points[static_cast<std::size_t>(i)]);
    ok[static_cast<std::size_t>(i)] = env.feasible ? 1 : 0;
    if (!env.feasible) return;
    for (std::size_t j = 0; j < nd; ++j) {
      lo[j] = std::min(lo[j], env.lower[j]);
      hi[j] = std::max(hi[j], env.upper[j]);
    }
  };

  if (exec == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) accumulate(out.lower_refined, out.upper_refined, i);
  } else {
#pragma omp parallel
    {
      std::vector<double> lo(nd, kInf);
      std::vector<double> hi(nd, -kInf);
#pragma omp for schedule(dynamic)
      for (std::int64_t i = 0; i < count; ++i) accumulate(lo, hi, i);
#pragma omp critical
      for (std::size_t j = 0; j < nd; ++j) {
        out.lower_refined[j] = std::min(out.lower_refined[j], lo[j]);
        out.upper_refined[j] = std::max(out.upper_refined[j], hi[j]);
      }
    }
  }

  for (std::size_t i = 0; i < mu_grid.points.size(); ++i) {
    out.feasible_mu.push_back({mu_grid.points[i], ok[i] != 0});
    out.any_feasible = out.any_feasible || ok[i] != 0;
  }
  return out;
}

}  // namespace isoband
