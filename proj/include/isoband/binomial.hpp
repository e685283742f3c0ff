#pragma once

#include <cstdint>
#include <vector>

namespace isoband {

/// Parameters of Bin(trials, prob). Construction validates trials >= 1 and
/// prob in [0, 1].
class BinomialParams {
 public:
  BinomialParams(std::int64_t trials, double prob);

  std::int64_t trials() const { return trials_; }
  double prob() const { return prob_; }

 private:
  std::int64_t trials_;
  double prob_;
};

/// P(Bin(m, p) = k), accurate to a few ulps relative (saddle-point form).
double binom_pmf(const BinomialParams& params, std::int64_t k);

/// P(Bin(m, p) <= k). Sums the smaller tail term by term from the exact pmf
/// at k, so the absolute error stays below 1e-12 for m up to ~1e5. Returns 0
/// for k < 0 and 1 for k >= m.
double binom_cdf(const BinomialParams& params, std::int64_t k);

/// Smallest k in {0, ..., m} with binom_cdf(k) >= kappa. Throws
/// std::invalid_argument unless 0 < kappa <= 1.
std::int64_t binom_quantile(const BinomialParams& params, double kappa);

/// binom_cdf(params, k) for k = 0..m. Entries are bit-identical to the
/// pointwise function so that table lookups and quantile searches agree.
std::vector<double> binom_cdf_table(const BinomialParams& params);

}  // namespace isoband
