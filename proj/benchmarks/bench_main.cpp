#include <benchmark/benchmark.h>

#include "iic/connectivity.hpp"
#include "iic/coupling.hpp"
#include "iic/estimator.hpp"
#include "iic/oracle.hpp"

namespace {

using namespace iic;

// One dual-arm trial at p = 1/2 from ring 2 to ring m.
void BM_ArmTrial(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_arm(Color::White, 1, m, 16, 0.5, 7, stream++, 1));
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_ArmTrial)->Arg(64)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SweepPerSite(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  RadialSweep sweep(1, m);
  StreamRng rng(3, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep.reach([&](std::size_t) { return (rng() & 1U) != 0; }));
  }
}
BENCHMARK(BM_SweepPerSite)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ExactThreshold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  PartialConfig eta(shared_ball(n));
  for (auto _ : state) {
    // A fresh oracle each time so the memo does not answer from cache.
    ConditionalOracle oracle(0.5);
    OracleBackend backend;
    backend.mode = BackendMode::Exact;
    backend.exact_limit = 37;
    benchmark::DoNotOptimize(oracle.cond_prob(CondQuery{Site{1, 0}, eta, n}, backend));
  }
}
BENCHMARK(BM_ExactThreshold)->Arg(2)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_CouplingReplica(benchmark::State& state) {
  ConditionalOracle oracle(0.5);
  OracleBackend backend;
  backend.mode = BackendMode::Exact;
  std::uint64_t replica = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_coupling(0, 1, 2, UniformField(11, replica++), oracle, backend));
  }
}
BENCHMARK(BM_CouplingReplica)->Unit(benchmark::kMicrosecond);

void BM_ExactTv(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(exact_tv(1, 1, 2, 0.5));
}
BENCHMARK(BM_ExactTv)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
