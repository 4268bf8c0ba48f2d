#include <benchmark/benchmark.h>

#include <random>

#include "qomsim/lindblad.hpp"
#include "qomsim/moments.hpp"
#include "qomsim/scenarios.hpp"
#include "qomsim/trajectory.hpp"

namespace {

using namespace qomsim;

SystemParams fig1b() {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = 1.4;
  p.rabi = 0.6;
  p.gamma_a = 0.01;
  p.gamma_b = 0.001;
  return p;
}

void BM_ClosedRhs(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MomentState s = random_moment_state(rng);
  const SystemParams p = fig1b();
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_rhs(s, p));
  }
}
BENCHMARK(BM_ClosedRhs);

void BM_ComposedRhs(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MomentState s = random_moment_state(rng);
  const SystemParams p = fig1b();
  for (auto _ : state) {
    benchmark::DoNotOptimize(composed_rhs(s, p));
  }
}
BENCHMARK(BM_ComposedRhs);

void BM_SimulateFig1b(benchmark::State& state) {
  const SystemParams p = fig1b();
  SimConfig sim;
  sim.t_end = 10.0;
  sim.n_samples = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_moments(p, sim));
  }
}
BENCHMARK(BM_SimulateFig1b)->Arg(11)->Arg(401)->Unit(benchmark::kMillisecond);

void BM_LindbladApply(benchmark::State& state) {
  SystemParams p;
  p.delta_c = 1.0;
  p.g_opt = 0.3;
  p.rabi = 0.1;
  p.gamma_a = 0.01;
  p.gamma_b = 0.001;
  const FockSpace sp{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
  const OperatorSet ops = build_operators(sp, p);
  const LindbladPropagator prop(ops, p);
  const DenseMatrix rho = thermal_state(sp, 0.2, 0.5);
  DenseMatrix drho(sp.dim(), sp.dim());
  for (auto _ : state) {
    prop.apply(rho, drho);
    benchmark::DoNotOptimize(drho.data());
  }
}
BENCHMARK(BM_LindbladApply)->Args({10, 14})->Args({14, 18})->Unit(benchmark::kMicrosecond);

void BM_ExactMoments(benchmark::State& state) {
  const FockSpace sp{10, 14};
  const OperatorSet ops = build_operators(sp, fig1b());
  const DenseMatrix rho = thermal_state(sp, 0.2, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_moments(rho, ops));
  }
}
BENCHMARK(BM_ExactMoments);

}  // namespace

BENCHMARK_MAIN();
