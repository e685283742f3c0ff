#include "isoband/binomial.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace isoband {

namespace {

// Stirling-series remainder  log(n!) - log(sqrt(2 pi n) (n/e)^n)  for small n.
constexpr std::array<double, 16> kStirlingErrorSmall = {
    0.0,
    0.08106146679532725821967026,
    0.04134069595540929409382208,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.01041126526197209649747857,
    0.009255462182712732917728637,
    0.008330563433362871256469319,
    0.007573675487951840794972024,
    0.006942840107209529865664153,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.00555473355196280137103869,
};

double stirling_error(std::int64_t n) {
  if (n < static_cast<std::int64_t>(kStirlingErrorSmall.size())) {
    return kStirlingErrorSmall[static_cast<std::size_t>(n)];
  }
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x = static_cast<double>(n);
  const double xx = x * x;
  if (n > 500) return (s0 - s1 / xx) / x;
  if (n > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// Deviance term  x log(x / np) + np - x, evaluated without cancellation.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

double pmf_raw(std::int64_t k, std::int64_t m, double p, double q) {
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 0.0) return k == m ? 1.0 : 0.0;
  const double md = static_cast<double>(m);
  if (k == 0) {
    const double lc = p < 0.1 ? -deviance(md, md * q) - md * p : md * std::log(q);
    return std::exp(lc);
  }
  if (k == m) {
    const double lc = q < 0.1 ? -deviance(md, md * p) - md * q : md * std::log(p);
    return std::exp(lc);
  }
  const double kd = static_cast<double>(k);
  const double lc = stirling_error(m) - stirling_error(k) - stirling_error(m - k) -
                    deviance(kd, md * p) - deviance(md - kd, md * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(kd) + std::log1p(-kd / md);
  return std::exp(lc - 0.5 * lf);
}

// Terms below this fraction of the running sum no longer change it.
constexpr double kTailCutoff = 1e-17;

}  // namespace

BinomialParams::BinomialParams(std::int64_t trials, double prob) : trials_(trials), prob_(prob) {
  if (trials < 1) throw std::invalid_argument("binomial: trials must be >= 1");
  if (!(prob >= 0.0 && prob <= 1.0)) {
    throw std::invalid_argument("binomial: probability must lie in [0, 1]");
  }
}

double binom_pmf(const BinomialParams& params, std::int64_t k) {
  const std::int64_t m = params.trials();
  if (k < 0 || k > m) return 0.0;
  return pmf_raw(k, m, params.prob(), 1.0 - params.prob());
}

double binom_cdf(const BinomialParams& params, std::int64_t k) {
  const std::int64_t m = params.trials();
  const double p = params.prob();
  if (k < 0) return 0.0;
  if (k >= m) return 1.0;
  if (p == 0.0) return 1.0;
  if (p == 1.0) return 0.0;
  const double q = 1.0 - p;

  if (static_cast<double>(k) < static_cast<double>(m) * p) {
    // Lower tail: walk down from k, terms decrease monotonically.
    const double ratio = q / p;
    double term = pmf_raw(k, m, p, q);
    double sum = term;
    for (std::int64_t i = k; i > 0; --i) {
      term *= static_cast<double>(i) / static_cast<double>(m - i + 1) * ratio;
      sum += term;
      if (term < sum * kTailCutoff) break;
    }
    return sum < 1.0 ? sum : 1.0;
  }

  // Upper tail: P(X > k), walk up from k + 1.
  const double ratio = p / q;
  double term = pmf_raw(k + 1, m, p, q);
  double upper = term;
  for (std::int64_t i = k + 1; i < m; ++i) {
    term *= static_cast<double>(m - i) / static_cast<double>(i + 1) * ratio;
    upper += term;
    if (term < upper * kTailCutoff) break;
  }
  return upper < 1.0 ? 1.0 - upper : 0.0;
}

std::int64_t binom_quantile(const BinomialParams& params, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("binom_quantile: kappa must lie in (0, 1], got " +
                                std::to_string(kappa));
  }
  std::int64_t lo = 0;
  std::int64_t hi = params.trials();  // binom_cdf(m) == 1 >= kappa
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (binom_cdf(params, mid) >= kappa) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

std::vector<double> binom_cdf_table(const BinomialParams& params) {
  const std::int64_t m = params.trials();
  std::vector<double> table(static_cast<std::size_t>(m) + 1);
  for (std::int64_t k = 0; k <= m; ++k) table[static_cast<std::size_t>(k)] = binom_cdf(params, k);
  return table;
}

}  // namespace isoband
