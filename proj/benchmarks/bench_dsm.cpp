#include <benchmark/benchmark.h>

#include "dsm/discrepancy.hpp"
#include "dsm/dsm_solver.hpp"
#include "dsm/harness.hpp"

namespace {

void BM_Factorize(benchmark::State& state) {
  const auto p = dsm::make_problem("gravity", static_cast<int>(state.range(0)), 0);
  for (auto _ : state) benchmark::DoNotOptimize(dsm::factorize(p.op));
}
BENCHMARK(BM_Factorize)->Arg(16)->Arg(32)->Arg(64)->Arg(128);

void BM_SolveADelta(benchmark::State& state) {
  const auto p = dsm::make_problem("synthetic", static_cast<int>(state.range(0)), 0);
  const auto noisy = dsm::perturb(p, 1e-3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dsm::solve_a_delta(p.fact, noisy.f_delta, 1e-3));
}
BENCHMARK(BM_SolveADelta)->Arg(32)->Arg(128);

void BM_IntegrateU(benchmark::State& state) {
  const auto p = dsm::make_problem("synthetic", static_cast<int>(state.range(0)), 0);
  const auto s = dsm::Schedule::standard();
  for (auto _ : state) benchmark::DoNotOptimize(dsm::integrate_u(s, p.fact, p.f, {}, 1e4));
}
BENCHMARK(BM_IntegrateU)->Arg(8)->Arg(32);

void BM_IntegralStoppingTime(benchmark::State& state) {
  const auto p = dsm::make_problem("synthetic", 32, 0);
  const auto noisy = dsm::perturb(p, 1e-3, 1);
  const auto s = dsm::Schedule::standard();
  for (auto _ : state)
    benchmark::DoNotOptimize(dsm::integral_stopping_time(s, p.fact, noisy.f_delta, 1e-3, {}, 1e16));
}
BENCHMARK(BM_IntegralStoppingTime);

}  // namespace

BENCHMARK_MAIN();
