// Serial reference vs OpenMP drivers for the hot kernels. Both drivers produce
// bit-identical results, so this only measures speed.
//
//   cva_bench --benchmark_filter=particle   (threads via OMP_NUM_THREADS)

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "cva/exec.hpp"
#include "cva/hydro.hpp"
#include "cva/particles.hpp"

using namespace cva;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::serial : Exec::parallel; }

ParticleState particles(std::int64_t n) {
  // About 100 particles per unit ball at any n.
  const double box = std::cbrt(static_cast<double>(n) * 4.0 / 3.0 * std::numbers::pi / 100.0);
  return make_state(static_cast<std::size_t>(n), box, 1, InitialOrientation{});
}

void BM_particle_step_continuous(benchmark::State& state) {
  const auto s = particles(state.range(0));
  ModelParams p;
  p.d = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(step_continuous(s, 0.05, p, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_particle_step_split(benchmark::State& state) {
  const auto s = particles(state.range(0));
  ModelParams p;
  p.d = 0.5;
  const SplitStepper split(p, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(split.step(s, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_moments(benchmark::State& state) {
  const auto s = particles(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_moments(s, BinSpec{8, 8, 8}, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_hydro_step(benchmark::State& state) {
  HydroState1D s;
  s.coeffs = {0.53, 3.19};
  const auto n = state.range(0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double z = (i + 0.5) / static_cast<double>(n);
    s.rho.push_back(1.0 + 0.1 * std::sin(2.0 * std::numbers::pi * z));
    s.theta.push_back(1.0 + 0.1 * std::cos(2.0 * std::numbers::pi * z));
    s.phi.push_back(1.0);
  }
  const double dt = stable_dt(s, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(step_hydro(s, dt, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * n);
}

// Second argument: 0 serial, 1 OpenMP.
BENCHMARK(BM_particle_step_continuous)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_particle_step_split)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_moments)->ArgsProduct({{100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hydro_step)->ArgsProduct({{4096, 65536}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
