// Serial reference vs OpenMP kernels, and naive vs sweep band.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "isoband/band.hpp"
#include "isoband/calibrate.hpp"
#include "isoband/simulate.hpp"
#include "isoband/sshape.hpp"

using namespace isoband;

namespace {

template <typename Fn>
double time_ms(Fn fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1000;
  const std::uint64_t reps = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2000;
  std::printf("threads=%d n=%zu reps=%llu\n", omp_get_max_threads(), n,
              static_cast<unsigned long long>(reps));

  ScenarioSpec spec;
  spec.n = n;
  spec.curve = CurveKind::logistic;
  const Dataset data = generate_data(spec, 0);
  const Grid grid = build_grid(data);
  const IntervalFamily family(grid, CardinalityRule{});
  const MonteCarlo mc{reps, 7};

  std::vector<double> a, b;
  const double mc_serial = time_ms([&] { a = simulate_ui_statistics(family, grid, 0.5, mc, Execution::serial); });
  const double mc_parallel = time_ms([&] { b = simulate_ui_statistics(family, grid, 0.5, mc, Execution::parallel); });
  std::printf("monte_carlo  serial %10.1f ms  parallel %10.1f ms  identical=%s\n", mc_serial, mc_parallel,
              a == b ? "yes" : "no");

  const CriticalValues cv = critical_values(kappa_bonferroni(family, 0.5, 0.05), 0.5, n);
  ConfidenceBand naive, sweep;
  const double t_naive = time_ms([&] { naive = naive_band(data, grid, family, cv); });
  const double t_sweep = time_ms([&] { sweep = compute_band(data, grid, family, cv); });
  std::printf("band         naive  %10.1f ms  sweep    %10.1f ms  identical=%s\n", t_naive, t_sweep,
              naive.lower == sweep.lower && naive.upper == sweep.upper ? "yes" : "no");

  const InflectionGrid mu = InflectionGrid::midpoints(grid);
  SShapeRefinement rs, rp;
  const double s_serial = time_ms([&] { rs = refine(sweep, mu, Execution::serial); });
  const double s_parallel = time_ms([&] { rp = refine(sweep, mu, Execution::parallel); });
  std::printf("refine       serial %10.1f ms  parallel %10.1f ms  identical=%s\n", s_serial, s_parallel,
              rs.lower_refined == rp.lower_refined && rs.upper_refined == rp.upper_refined ? "yes" : "no");
  return 0;
}
