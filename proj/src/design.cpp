#include "isoband/design.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace isoband {

Dataset::Dataset(std::vector<Observation> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("dataset is empty");
  for (const auto& p : pairs_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("dataset contains a non-finite value");
    }
  }
  std::sort(pairs_.begin(), pairs_.end(), [](const Observation& a, const Observation& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
}

Dataset Dataset::reflected() const {
  std::vector<Observation> out;
  out.reserve(pairs_.size());
  for (const auto& p : pairs_) out.push_back({-p.x, -p.y});
  return Dataset(std::move(out));
}

Grid build_grid(const Dataset& data) {
  Grid grid;
  const auto pairs = data.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 0 || pairs[i].x != pairs[i - 1].x) {
      grid.z.push_back(pairs[i].x);
      grid.prefix.push_back(i);
    }
  }
  grid.prefix.push_back(pairs.size());
  return grid;
}

std::string to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::all: return "all";
    case RuleKind::triangular: return "triangular";
    case RuleKind::fibonacci: return "fibonacci";
    case RuleKind::powers_of_two: return "pow2";
    case RuleKind::explicit_list: return "explicit";
  }
  return "unknown";
}

std::string to_string(CapConvention cap) { return cap == CapConvention::half ? "half" : "full"; }

RuleKind parse_rule_kind(const std::string& name) {
  if (name == "all") return RuleKind::all;
  if (name == "triangular") return RuleKind::triangular;
  if (name == "fibonacci") return RuleKind::fibonacci;
  if (name == "pow2") return RuleKind::powers_of_two;
  throw std::invalid_argument("unknown family rule '" + name + "'");
}

CapConvention parse_cap(const std::string& name) {
  if (name == "half") return CapConvention::half;
  if (name == "full") return CapConvention::full;
  throw std::invalid_argument("unknown cap convention '" + name + "'");
}

std::size_t cap_value(CapConvention cap, std::size_t n_distinct) {
  return cap == CapConvention::half ? (n_distinct + 1) / 2 : n_distinct;
}

std::vector<std::size_t> expand_rule(const CardinalityRule& rule, std::size_t n_distinct) {
  if (n_distinct < 1) throw std::invalid_argument("expand_rule: empty grid");
  const std::size_t cap = cap_value(rule.cap, n_distinct);
  std::vector<std::size_t> out;
  switch (rule.kind) {
    case RuleKind::all:
      for (std::size_t d = 1; d <= cap; ++d) out.push_back(d);
      break;
    case RuleKind::triangular:
      // a_l = 1 + l (l - 1) / 2
      for (std::size_t l = 1, a = 1; a <= cap; a += l, ++l) out.push_back(a);
      break;
    case RuleKind::fibonacci:
      for (std::size_t a = 1, b = 2; a <= cap; std::tie(a, b) = std::pair{b, a + b}) {
        out.push_back(a);
      }
      break;
    case RuleKind::powers_of_two:
      for (std::size_t a = 1; a <= cap; a *= 2) out.push_back(a);
      break;
    case RuleKind::explicit_list: {
      for (std::size_t d : rule.values) {
        if (d < 1 || d > n_distinct) {
          throw std::invalid_argument("explicit cardinality " + std::to_string(d) +
                                      " outside 1.." + std::to_string(n_distinct));
        }
      }
      if (std::find(rule.values.begin(), rule.values.end(), 1) == rule.values.end()) {
        throw std::invalid_argument("explicit cardinality list must contain 1");
      }
      for (std::size_t d : rule.values) {
        if (d <= cap) out.push_back(d);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      break;
    }
  }
  return out;
}

IntervalFamily::IntervalFamily(const Grid& grid, const CardinalityRule& rule)
    : rule_(rule),
      n_distinct_(grid.distinct()),
      cardinalities_(expand_rule(rule, grid.distinct())),
      admissible_(grid.distinct() + 1, false),
      multiplicities_(grid.observations() + 1, 0) {
  for (std::size_t d : cardinalities_) admissible_[d] = true;
  for (std::size_t last = 0; last < n_distinct_; ++last) {
    for (std::size_t d : cardinalities_) {
      if (d > last + 1) break;
      const std::size_t first = last + 1 - d;
      const std::size_t count = grid.count(first, last);
      members_.push_back({first, last, count});
      ++multiplicities_[count];
    }
  }
  std::sort(members_.begin(), members_.end(), [](const Interval& a, const Interval& b) {
    return a.last < b.last || (a.last == b.last && a.first < b.first);
  });
}

}  // namespace isoband
