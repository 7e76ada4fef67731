// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <vector>

#include "wlanpace/controller.hpp"
#include "wlanpace/pf_solver.hpp"
#include "wlanpace/plant_sim.hpp"

namespace {

using namespace wlanpace;

WlanModelConfig model_of(std::size_t n) {
  WlanModelConfig cfg;
  cfg.stations = n;
  cfg.overhead_s = 2e-4 * static_cast<double>(n);
  cfg.tx_time_s.assign(n, mcs_to_w(9, 1));
  return cfg;
}

QosTargets qos() {
  QosTargets q;
  q.delay_target_s = 10e-3;
  q.agg_cap = 48.0;
  return q;
}

void BM_SolveFixedPoint(benchmark::State& state) {
  const auto cfg = model_of(static_cast<std::size_t>(state.range(0)));
  const auto q = qos();
  for (auto _ : state) {
    auto sol = solve_fixed_point(cfg, q);
    benchmark::DoNotOptimize(sol.nu);
  }
}
BENCHMARK(BM_SolveFixedPoint)->Arg(1)->Arg(10)->Arg(25);

void BM_VerifyKkt(benchmark::State& state) {
  const auto cfg = model_of(static_cast<std::size_t>(state.range(0)));
  const auto q = qos();
  const auto sol = solve_fixed_point(cfg, q);
  for (auto _ : state) {
    auto cert = verify_kkt(sol, cfg, q);
    benchmark::DoNotOptimize(cert.accepted);
  }
}
BENCHMARK(BM_VerifyKkt)->Arg(1)->Arg(25);

void BM_BruteForceOracle(benchmark::State& state) {
  const auto cfg = model_of(static_cast<std::size_t>(state.range(0)));
  const auto q = qos();
  for (auto _ : state) {
    auto x = brute_force_oracle(cfg, q);
    benchmark::DoNotOptimize(x.pps[0]);
  }
}
BENCHMARK(BM_BruteForceOracle)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_PlantStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cfg = model_of(n);
  PlantConfig pc;
  pc.overhead_s = cfg.overhead_s;
  pc.tx_time_s = cfg.tx_time_s;
  pc.noise_sigma = 1.0;
  Plant plant(pc);
  AggregationVector agg;
  agg.ppf.assign(n, 16.0);
  const auto x = inverse_aggregation_map(agg, cfg);
  for (auto _ : state) {
    auto m = plant.step(x);
    benchmark::DoNotOptimize(m.delay_s);
  }
}
BENCHMARK(BM_PlantStep)->Arg(1)->Arg(10)->Arg(25);

void BM_ControllerStep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Controller ctl(model_of(n), qos(), ControllerGains{});
  FeedbackReport report;
  report.measured.ppf.assign(n, 12.0);
  report.phy_rate_bps.assign(n, 390e6);
  for (auto _ : state) {
    report.slot += 1;
    auto x = ctl.step(report);
    benchmark::DoNotOptimize(x.pps[0]);
  }
}
BENCHMARK(BM_ControllerStep)->Arg(1)->Arg(10)->Arg(25);

}  // namespace

BENCHMARK_MAIN();
