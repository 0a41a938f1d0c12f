#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "barostoch/fluid.hpp"
#include "barostoch/noise.hpp"
#include "barostoch/paths.hpp"

using namespace barostoch;

namespace {

void BM_Step(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid1D grid(n, 1.0);
  const PressureLaw law(2.0, 1.0);
  const Viscosity visc(0.0075, 0.0);
  const auto noise = NoiseField::zero(n, 1.0, 1.0);
  std::vector<double> rho(grid.size());
  for (int i = 0; i < n; ++i) {
    const double s = (grid.center(i) - 0.5) / 0.1;
    rho[static_cast<std::size_t>(i)] = 1.0 + 0.5 * std::exp(-0.5 * s * s);
  }
  State s = make_initial_state(rho, std::vector<double>(grid.size(), 0.0), grid);
  const double dt = cfl_dt(s, law, visc, grid, 0.5);
  for (auto _ : st) {
    s.t = 0.0;
    benchmark::DoNotOptimize(step_deterministic(s, noise, dt, law, visc, grid));
  }
  st.SetItemsProcessed(st.iterations() * n);
}
BENCHMARK(BM_Step)->Arg(128)->Arg(256)->Arg(512);

void BM_Skorokhod(benchmark::State& st) {
  const int jumps = static_cast<int>(st.range(0));
  std::vector<Jump> a;
  std::vector<Jump> b;
  for (int k = 0; k < jumps; ++k) {
    const double t = (k + 0.5) / jumps;
    a.push_back({t, k % 2 ? 1.0 : -0.5});
    b.push_back({t + 0.1 / jumps, k % 2 ? 1.1 : -0.5});
  }
  const CadlagPath x(1.0, {0.0}, {0.0}, a);
  const CadlagPath y(1.0, {0.0}, {0.0}, b);
  for (auto _ : st) benchmark::DoNotOptimize(skorokhod_distance(x, y));
}
BENCHMARK(BM_Skorokhod)->Arg(4)->Arg(16)->Arg(32);

void BM_SampleLevy(benchmark::State& st) {
  LevySpec spec;
  spec.brownian_scale = 0.3;
  spec.jump_layers.push_back({LevyMeasureDiscrete({{0.4, 1.0}, {-0.4, 1.0}}), false});
  spec.truncation_radii.push_back(0.2);
  std::vector<double> grid(257);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = static_cast<double>(k) / 256.0;
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample_levy(spec, 1.0, grid, seed++));
}
BENCHMARK(BM_SampleLevy);

}  // namespace
BENCHMARK_MAIN();
