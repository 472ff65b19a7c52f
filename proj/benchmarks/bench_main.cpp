#include <benchmark/benchmark.h>

#include "hetnet/coverage.hpp"
#include "hetnet/mcsim.hpp"
#include "hetnet/xform.hpp"

using namespace hetnet;

static void BM_GammaTailSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto d = exp_stable_derivatives(0.02, 4.0, 50.0, n - 1);
    benchmark::DoNotOptimize(gamma_tail_sum(d, n).value);
  }
}
BENCHMARK(BM_GammaTailSum)->Arg(8)->Arg(32)->Arg(100)->Arg(200);

static void BM_GammaTailSumExtended(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto d = exp_stable_derivatives<ExtendedReal>(0.02, 4.0, 50.0, n - 1);
    benchmark::DoNotOptimize(gamma_tail_sum(d, n).value);
  }
}
BENCHMARK(BM_GammaTailSumExtended)->Arg(32)->Arg(200);

static void BM_UplinkMueCoverage(benchmark::State& state) {
  NetworkParams p = fig1_params();
  p.n_antennas = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(uplink_mue_coverage(p).value);
}
BENCHMARK(BM_UplinkMueCoverage)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_DownlinkMacroAse(benchmark::State& state) {
  const NetworkParams p = table1_params(10, static_cast<int>(state.range(0)), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(macro_ase_dl(p).value);
}
BENCHMARK(BM_DownlinkMacroAse)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_SmallCellAse(benchmark::State& state) {
  const NetworkParams p = fig1_params();
  for (auto _ : state) benchmark::DoNotOptimize(sc_ase_ul(p).value);
}
BENCHMARK(BM_SmallCellAse)->Unit(benchmark::kMillisecond);

static void BM_OptimalQ(benchmark::State& state) {
  const NetworkParams p = fig1_params();
  for (auto _ : state) benchmark::DoNotOptimize(optimal_q(p, 1e-2).q);
}
BENCHMARK(BM_OptimalQ)->Unit(benchmark::kMillisecond);

// Per-drop cost of the Monte Carlo oracle, single thread.
static void BM_McUplinkDrops(benchmark::State& state) {
  DropConfig cfg;
  cfg.params = fig1_params();
  cfg.params.n_antennas = 8;
  cfg.n_drops = 2000;
  cfg.threads = 1;
  cfg.fidelity = state.range(0) ? Fidelity::channel : Fidelity::distribution;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_uplink_mue_coverage(cfg).mean);
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cfg.n_drops));
}
BENCHMARK(BM_McUplinkDrops)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_McDownlinkDrops(benchmark::State& state) {
  DropConfig cfg;
  cfg.params = table1_params(4, 32, 0.5);
  cfg.n_drops = 2000;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(estimate_dl_coverage(cfg).sbs.mean);
  state.SetItemsProcessed(state.iterations() * 2 * static_cast<int64_t>(cfg.n_drops));
}
BENCHMARK(BM_McDownlinkDrops)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
