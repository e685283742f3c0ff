#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace isoband {

struct Observation {
  double x;
  double y;
};

/// Observed pairs sorted by (x, y). Rejects empty input and non-finite values.
class Dataset {
 public:
  explicit Dataset(std::vector<Observation> pairs);

  std::span<const Observation> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

  /// The point reflection (x, y) -> (-x, -y), re-sorted.
  Dataset reflected() const;

 private:
  std::vector<Observation> pairs_;
};

/// Distinct covariate values z[0] < ... < z[n_distinct - 1] and prefix counts:
/// prefix[j] = #{i : x_i < z[j]} for j < n_distinct, prefix[n_distinct] = n.
/// Observations of grid point j occupy pairs()[prefix[j] .. prefix[j + 1]).
struct Grid {
  std::vector<double> z;
  std::vector<std::size_t> prefix;

  std::size_t distinct() const { return z.size(); }
  std::size_t observations() const { return prefix.back(); }
  std::size_t count(std::size_t first, std::size_t last) const {
    return prefix[last + 1] - prefix[first];
  }
};

Grid build_grid(const Dataset& data);

enum class RuleKind { all, triangular, fibonacci, powers_of_two, explicit_list };

/// Admissible cardinalities are capped at ceil(n_distinct / 2) or n_distinct.
enum class CapConvention { half, full };

struct CardinalityRule {
  RuleKind kind = RuleKind::triangular;
  CapConvention cap = CapConvention::half;
  std::vector<std::size_t> values;  // explicit_list only
};

std::string to_string(RuleKind kind);
std::string to_string(CapConvention cap);
RuleKind parse_rule_kind(const std::string& name);
CapConvention parse_cap(const std::string& name);

std::size_t cap_value(CapConvention cap, std::size_t n_distinct);

/// The sorted set of admissible distinct-point cardinalities.
std::vector<std::size_t> expand_rule(const CardinalityRule& rule, std::size_t n_distinct);

/// Grid-index interval [z[first], z[last]] holding `count` observations.
struct Interval {
  std::size_t first;
  std::size_t last;
  std::size_t count;
};

/// All grid intervals whose number of distinct points lies in the expanded
/// rule. Membership is a function of the cardinality only, so the family is
/// closed under grid reversal.
class IntervalFamily {
 public:
  IntervalFamily(const Grid& grid, const CardinalityRule& rule);

  bool contains(std::size_t first, std::size_t last) const {
    return first <= last && last < n_distinct_ && admissible_[last - first + 1];
  }

  /// Members ordered by (last, first).
  std::span<const Interval> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  std::size_t n_distinct() const { return n_distinct_; }

  /// Expanded cardinality set.
  std::span<const std::size_t> cardinalities() const { return cardinalities_; }

  /// multiplicities()[m] = number of members holding m observations, m = 0..n.
  std::span<const std::size_t> multiplicities() const { return multiplicities_; }

  const CardinalityRule& rule() const { return rule_; }

 private:
  CardinalityRule rule_;
  std::size_t n_distinct_;
  std::vector<std::size_t> cardinalities_;
  std::vector<bool> admissible_;
  std::vector<Interval> members_;
  std::vector<std::size_t> multiplicities_;
};

inline IntervalFamily build_family(const Grid& grid, const CardinalityRule& rule) {
  return IntervalFamily(grid, rule);
}

}  // namespace isoband
