#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "isoband/binomial.hpp"

using namespace isoband;
namespace mp = boost::multiprecision;

namespace {

// Exact P(Bin(m, p) <= k) for a dyadic p = num / 2^bits, as a rational.
double exact_cdf(int m, int num, int bits, int k) {
  const mp::cpp_int denom = mp::cpp_int(1) << bits;
  mp::cpp_int total = 0;
  mp::cpp_int choose = 1;
  for (int i = 0; i <= k && i <= m; ++i) {
    if (i > 0) choose = choose * (m - i + 1) / i;
    mp::cpp_int term = choose;
    for (int a = 0; a < i; ++a) term *= num;
    for (int a = 0; a < m - i; ++a) term *= (denom - num);
    total += term;
  }
  mp::cpp_int all = 1;
  for (int a = 0; a < m; ++a) all *= denom;
  return static_cast<double>(mp::cpp_rational(total, all));
}

double high_precision_cdf(int m, double p, int k) {
  using F = mp::cpp_bin_float_100;
  F sum = 0;
  F choose = 1;
  const F pp = p;
  const F qq = F(1) - pp;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) choose = choose * (m - i + 1) / i;
    sum += choose * mp::pow(pp, i) * mp::pow(qq, m - i);
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("cdf small cases") {
  CHECK(binom_cdf(BinomialParams(5, 0.2), 0) == doctest::Approx(0.32768).epsilon(1e-14));
  CHECK(binom_cdf(BinomialParams(2, 0.5), 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(binom_cdf(BinomialParams(4, 0.3), -1) == 0.0);
  CHECK(binom_cdf(BinomialParams(4, 0.3), 4) == 1.0);
  CHECK(binom_cdf(BinomialParams(4, 0.3), 9) == 1.0);
}

TEST_CASE("degenerate success probabilities") {
  CHECK(binom_cdf(BinomialParams(6, 0.0), 0) == 1.0);
  CHECK(binom_cdf(BinomialParams(6, 1.0), 5) == 0.0);
  CHECK(binom_quantile(BinomialParams(6, 0.0), 0.3) == 0);
  CHECK(binom_quantile(BinomialParams(6, 1.0), 1e-9) == 6);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(BinomialParams(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(BinomialParams(3, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(BinomialParams(3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(binom_quantile(BinomialParams(3, 0.5), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(binom_quantile(BinomialParams(3, 0.5), 1.0 + 1e-12), std::invalid_argument);
}

TEST_CASE("exact rational oracle up to m = 100") {
  // p in {1/2, 1/4, 3/4, 1/8, 5/16}: exactly representable.
  const int nums[][2] = {{1, 1}, {1, 2}, {3, 2}, {1, 3}, {5, 4}};
  for (int m : {1, 2, 3, 7, 10, 25, 50, 64, 99, 100}) {
    for (const auto& np : nums) {
      const double p = std::ldexp(static_cast<double>(np[0]), -np[1]);
      const BinomialParams params(m, p);
      for (int k = 0; k <= m; ++k) {
        const double want = exact_cdf(m, np[0], np[1], k);
        CHECK(std::abs(binom_cdf(params, k) - want) <= 1e-12);
      }
    }
  }
}

TEST_CASE("high-precision spot values at m = 1000") {
  for (int k : {300, 450, 480, 500, 520, 560}) {
    CHECK(std::abs(binom_cdf(BinomialParams(1000, 0.5), k) - high_precision_cdf(1000, 0.5, k)) <= 1e-12);
  }
  for (int k : {180, 230, 250, 270}) {
    CHECK(std::abs(binom_cdf(BinomialParams(1000, 0.25), k) - high_precision_cdf(1000, 0.25, k)) <= 1e-12);
  }
  // Deep tail: relative accuracy matters for kappa near 1e-5 and below.
  const double tail = high_precision_cdf(1000, 0.5, 400);
  CHECK(binom_cdf(BinomialParams(1000, 0.5), 400) == doctest::Approx(tail).epsilon(1e-12));
}

TEST_CASE("quantile examples") {
  CHECK(binom_quantile(BinomialParams(7, 0.3), 1.0) == 7);
  CHECK(binom_quantile(BinomialParams(2, 0.5), 0.3) == 1);
  CHECK(binom_quantile(BinomialParams(10, 0.5), 0.001) == 1);
}

TEST_CASE("cdf is nondecreasing and reaches one") {
  for (int m : {1, 5, 17, 200, 3000}) {
    for (double p : {0.01, 0.25, 0.5, 0.9}) {
      const BinomialParams params(m, p);
      double prev = 0.0;
      for (int k = 0; k <= m; ++k) {
        const double v = binom_cdf(params, k);
        CHECK(v >= prev);
        prev = v;
      }
      CHECK(prev == 1.0);
    }
  }
}

TEST_CASE("quantile round trip") {
  for (int m = 1; m <= 200; ++m) {
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      const BinomialParams params(m, p);
      for (double kappa : {1e-12, 1e-8, 1e-5, 1e-3, 0.01, 0.05, 0.2, 0.5, 0.8, 0.99, 1.0}) {
        const auto q = binom_quantile(params, kappa);
        REQUIRE(q >= 0);
        REQUIRE(q <= m);
        CHECK(binom_cdf(params, q) >= kappa);
        CHECK((q == 0 || binom_cdf(params, q - 1) < kappa));
      }
    }
  }
}

TEST_CASE("table matches pointwise cdf bit for bit") {
  for (int m : {1, 9, 250, 1001}) {
    for (double p : {0.25, 0.5, 0.75}) {
      const BinomialParams params(m, p);
      const auto table = binom_cdf_table(params);
      REQUIRE(table.size() == static_cast<std::size_t>(m + 1));
      for (int k = 0; k <= m; ++k) CHECK(table[static_cast<std::size_t>(k)] == binom_cdf(params, k));
    }
  }
}

TEST_CASE("Hoeffding lower bound on the quantile") {
  for (int m = 1; m <= 2000; m += (m < 100 ? 1 : 37)) {
    for (double gamma : {0.25, 0.5, 0.75}) {
      for (double kappa : {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
        const auto q = binom_quantile(BinomialParams(m, gamma), kappa);
        CHECK(static_cast<double>(q) >= m * gamma - std::sqrt(m * std::log(1.0 / kappa) / 2.0));
      }
    }
  }
}
