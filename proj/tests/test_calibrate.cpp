#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "isoband/binomial.hpp"
#include "isoband/calibrate.hpp"

using namespace isoband;

namespace {

Dataset dataset_from_x(const std::vector<double>& xs) {
  std::vector<Observation> pairs;
  for (double x : xs) pairs.push_back({x, 0.0});
  return Dataset(pairs);
}

Grid tie_free(std::size_t nd) {
  std::vector<double> xs(nd);
  std::iota(xs.begin(), xs.end(), 1.0);
  return build_grid(dataset_from_x(xs));
}

Grid reversed(const Grid& g) {
  Grid r;
  const std::size_t nd = g.distinct();
  r.prefix.push_back(0);
  for (std::size_t j = nd; j-- > 0;) {
    r.z.push_back(-g.z[j]);
    r.prefix.push_back(r.prefix.back() + g.count(j, j));
  }
  return r;
}

Grid random_tied_grid(std::mt19937_64& gen, std::size_t n, int levels) {
  std::uniform_int_distribution<int> pick(0, levels - 1);
  std::vector<double> xs;
  for (std::size_t i = 0; i < n; ++i) xs.push_back(pick(gen));
  return build_grid(dataset_from_x(xs));
}

// Direct re-enumeration without prefix sums or tables.
double nested_ui(const std::vector<std::uint8_t>& xi, const IntervalFamily& f, const Grid& g, double gamma) {
  double stat = 1.0;
  for (std::size_t j = 0; j < g.distinct(); ++j) {
    for (std::size_t k = j; k < g.distinct(); ++k) {
      if (!f.contains(j, k)) continue;
      std::int64_t t = 0, m = 0;
      for (std::size_t i = g.prefix[j]; i < g.prefix[k + 1]; ++i) {
        t += xi[i];
        ++m;
      }
      stat = std::min({stat, binom_cdf(BinomialParams(m, gamma), t),
                       binom_cdf(BinomialParams(m, 1.0 - gamma), m - t)});
    }
  }
  return stat;
}

const CardinalityRule kAll{RuleKind::all, CapConvention::full, {}};
const CardinalityRule kTri{RuleKind::triangular, CapConvention::half, {}};

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS((CalibrationConfig{0.0, 0.05, Bonferroni{}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CalibrationConfig{0.5, 1.5, Bonferroni{}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CalibrationConfig{0.5, 0.05, MonteCarlo{0, 1}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CalibrationConfig{0.5, 0.05, FixedKappa{0.0}}.validate()), std::invalid_argument);
  CHECK_NOTHROW((CalibrationConfig{0.5, 0.05, FixedKappa{1.0}}.validate()));
}

TEST_CASE("critical value examples") {
  const auto one = critical_values(1.0, 0.3, 9);
  for (std::size_t m = 1; m <= 9; ++m) {
    CHECK(one.lower[m] == m);
    CHECK(one.upper[m] == m);
  }
  const auto sym = critical_values(0.01, 0.5, 200);
  CHECK(sym.lower == sym.upper);
  const auto cv = critical_values(0.6, 0.5, 3);
  CHECK(cv.lower[1] == 1);
  CHECK(cv.lower[2] == 1);
  CHECK(cv.lower[3] == 2);
  const auto mono = critical_values(1e-4, 0.25, 500);
  for (std::size_t m = 2; m <= 500; ++m) {
    CHECK(mono.lower[m] >= mono.lower[m - 1]);
    CHECK(mono.upper[m] >= mono.upper[m - 1]);
  }
}

TEST_CASE("bonferroni bound examples") {
  const Grid g1 = tie_free(1);
  const IntervalFamily f1(g1, kAll);
  CHECK(bonferroni_bound(f1, 0.5, 1.0) == doctest::Approx(1.0));
  const IntervalFamily f(tie_free(30), kTri);
  CHECK(bonferroni_bound(f, 0.5, 1e-15) == 0.0);
}

TEST_CASE("bonferroni bound is nondecreasing in kappa") {
  const IntervalFamily f(tie_free(80), kTri);
  for (double gamma : {0.25, 0.5}) {
    double prev = 0.0;
    for (double lk = -12.0; lk <= 0.0; lk += 0.05) {
      const double b = bonferroni_bound(f, gamma, std::pow(10.0, lk));
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("bonferroni kappa is maximal") {
  for (std::size_t nd : {1u, 2u, 7u, 40u, 200u}) {
    for (auto kind : {RuleKind::all, RuleKind::triangular, RuleKind::fibonacci, RuleKind::powers_of_two}) {
      for (double gamma : {0.25, 0.5}) {
        const IntervalFamily f(tie_free(nd), {kind, CapConvention::half, {}});
        const double alpha = 0.05;
        const double k = kappa_bonferroni(f, gamma, alpha);
        CHECK(bonferroni_bound(f, gamma, k) <= alpha);
        if (k < 1.0) CHECK(bonferroni_bound(f, gamma, k * (1.0 + 1e-6)) > alpha);
        const double ndd = static_cast<double>(nd);
        CHECK(k >= alpha / (ndd * (ndd + 1.0)));
      }
    }
  }
}

TEST_CASE("bonferroni kappa against a dense grid search") {
  for (auto cap : {CapConvention::half, CapConvention::full}) {
    const IntervalFamily f(tie_free(6), {RuleKind::all, cap, {}});
    double best = 0.0;
    for (int i = 1; i <= 1000000; ++i) {
      const double k = 1e-6 * i;
      if (bonferroni_bound(f, 0.5, k) <= 0.05) best = k;
    }
    const double got = kappa_bonferroni(f, 0.5, 0.05);
    CHECK(got >= best);
    CHECK(got < best + 1e-6);
  }
}

TEST_CASE("bonferroni reversal and complement invariance") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 5; ++rep) {
    const Grid g = random_tied_grid(gen, 60, 25);
    const Grid gr = reversed(g);
    for (auto kind : {RuleKind::all, RuleKind::triangular, RuleKind::fibonacci}) {
      const CardinalityRule r{kind, CapConvention::half, {}};
      for (double gamma : {0.25, 0.5, 0.125}) {
        CHECK(kappa_bonferroni(IntervalFamily(g, r), gamma, 0.05) ==
              kappa_bonferroni(IntervalFamily(gr, r), 1.0 - gamma, 0.05));
      }
    }
  }
}

TEST_CASE("ui statistic examples") {
  const Grid g2 = tie_free(2);
  const IntervalFamily f2(g2, kAll);
  const std::vector<std::uint8_t> ones{1, 1};
  CHECK(ui_statistic(ones, f2, g2, 0.5) == doctest::Approx(0.25));
  const Grid g1 = tie_free(1);
  const IntervalFamily f1(g1, kAll);
  const std::vector<std::uint8_t> one{1};
  CHECK(ui_statistic(one, f1, g1, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ui_statistic(ones, f1, g1, 0.5), std::invalid_argument);
}

TEST_CASE("ui statistic against nested loops") {
  std::mt19937_64 gen(17);
  std::bernoulli_distribution coin(0.4);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + gen() % 14;
    const Grid g = random_tied_grid(gen, n, 10);
    const auto kind = static_cast<RuleKind>(gen() % 4);
    const IntervalFamily f(g, {kind, rep % 2 ? CapConvention::full : CapConvention::half, {}});
    std::vector<std::uint8_t> xi(n);
    for (auto& v : xi) v = coin(gen) ? 1 : 0;
    for (double gamma : {0.25, 0.5, 0.75}) {
      CHECK(ui_statistic(xi, f, g, gamma) == nested_ui(xi, f, g, gamma));
    }
  }
}

TEST_CASE("statistic threshold equals the simultaneous critical-count event") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 1 + gen() % 10;
    const Grid g = random_tied_grid(gen, n, 6);
    const IntervalFamily f(g, {static_cast<RuleKind>(rep % 4), CapConvention::full, {}});
    for (double gamma : {0.25, 0.5}) {
      for (double kappa : {0.01, 0.1, 0.3, 0.6, 1.0}) {
        const auto cv = critical_values(kappa, gamma, n);
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
          std::vector<std::uint8_t> xi(n);
          for (std::size_t i = 0; i < n; ++i) xi[i] = (mask >> i) & 1u;
          bool all_ok = true;
          for (const auto& b : f.members()) {
            std::size_t t = 0;
            for (std::size_t i = g.prefix[b.first]; i < g.prefix[b.last + 1]; ++i) t += xi[i];
            all_ok = all_ok && t >= cv.lower[b.count] && b.count - t >= cv.upper[b.count];
          }
          CHECK((ui_statistic(xi, f, g, gamma) >= kappa) == all_ok);
        }
      }
    }
  }
}

TEST_CASE("empirical quantile rank") {
  std::vector<double> s(199999);
  std::iota(s.begin(), s.end(), 1.0);
  std::shuffle(s.begin(), s.end(), std::mt19937_64(1));
  CHECK(empirical_quantile(s, 0.05) == 10000.0);
  CHECK(empirical_quantile({0.7}, 0.05) == 0.7);
  CHECK(empirical_quantile({3.0, 1.0, 2.0}, 0.999) == 3.0);
  CHECK_THROWS_AS(empirical_quantile({}, 0.05), std::invalid_argument);
}

TEST_CASE("monte carlo with one replicate returns that statistic") {
  const Grid g = tie_free(12);
  const IntervalFamily f(g, kTri);
  const CalibrationConfig cfg{0.5, 0.05, MonteCarlo{1, 99}};
  const auto stats = simulate_ui_statistics(f, g, 0.5, MonteCarlo{1, 99});
  CHECK(kappa_monte_carlo(f, g, cfg) == stats[0]);
}

TEST_CASE("monte carlo serial and parallel agree bit for bit") {
  std::mt19937_64 gen(8);
  const Grid g = random_tied_grid(gen, 150, 90);
  const IntervalFamily f(g, kTri);
  const MonteCarlo mc{3000, 12345};
  CHECK(simulate_ui_statistics(f, g, 0.25, mc, Execution::serial) ==
        simulate_ui_statistics(f, g, 0.25, mc, Execution::parallel));
  const CalibrationConfig cfg{0.25, 0.05, mc};
  CHECK(kappa_monte_carlo(f, g, cfg, Execution::serial) == kappa_monte_carlo(f, g, cfg, Execution::parallel));
}

TEST_CASE("monte carlo fraction below kappa is at most alpha") {
  const Grid g = tie_free(40);
  const IntervalFamily f(g, kTri);
  for (double alpha : {0.05, 0.1, 0.2}) {
    const MonteCarlo mc{4000, 5};
    const auto stats = simulate_ui_statistics(f, g, 0.5, mc);
    const double k = empirical_quantile(stats, alpha);
    const auto below = std::count_if(stats.begin(), stats.end(), [&](double s) { return s < k; });
    CHECK(static_cast<double>(below) / static_cast<double>(stats.size()) <= alpha);
  }
}

TEST_CASE("monte carlo reversal and complement invariance with mirrored streams") {
  std::mt19937_64 gen(29);
  for (int rep = 0; rep < 3; ++rep) {
    const Grid g = random_tied_grid(gen, 80, 50);
    const Grid gr = reversed(g);
    for (double gamma : {0.25, 0.5, 0.125}) {
      const IntervalFamily f(g, kTri);
      const IntervalFamily fr(gr, kTri);
      const MonteCarlo mc{1500, 77};
      const auto a = simulate_ui_statistics(f, g, gamma, mc, Execution::parallel, StreamOrientation::forward);
      const auto b =
          simulate_ui_statistics(fr, gr, 1.0 - gamma, mc, Execution::parallel, StreamOrientation::mirrored);
      CHECK(a == b);
      const CalibrationConfig c1{gamma, 0.05, mc};
      const CalibrationConfig c2{1.0 - gamma, 0.05, mc};
      CHECK(kappa_monte_carlo(f, g, c1, Execution::parallel, StreamOrientation::forward) ==
            kappa_monte_carlo(fr, gr, c2, Execution::parallel, StreamOrientation::mirrored));
    }
  }
}

TEST_CASE("monte carlo kappa dominates bonferroni") {
  for (std::size_t nd : {50u, 100u}) {
    const Grid g = tie_free(nd);
    for (double gamma : {0.25, 0.5}) {
      const IntervalFamily f(g, kTri);
      const double bonf = kappa_bonferroni(f, gamma, 0.05);
      const double mc = kappa_monte_carlo(f, g, {gamma, 0.05, MonteCarlo{20000, 2024}});
      CHECK(mc >= 0.9 * bonf);
    }
  }
}

TEST_CASE("calibrate dispatch") {
  const Grid g = tie_free(20);
  const IntervalFamily f(g, kTri);
  CHECK(calibrate(f, g, {0.5, 0.05, FixedKappa{0.3}}).kappa == 0.3);
  CHECK(calibrate(f, g, {0.5, 0.05, Bonferroni{}}).kappa == kappa_bonferroni(f, 0.5, 0.05));
  const auto cv = calibrate(f, g, {0.5, 0.05, FixedKappa{0.3}});
  CHECK(cv.lower.size() == 21);
  CHECK(method_name(Bonferroni{}) == "bonferroni");
  CHECK(method_name(MonteCarlo{}) == "monte_carlo");
  CHECK(method_name(FixedKappa{}) == "fixed");
}
