#include <benchmark/benchmark.h>

#include "esim/commands.hpp"
#include "esim/config.hpp"
#include "esim/engine.hpp"
#include "esim/metrics.hpp"

namespace {

using namespace esim;

void BM_Interp(benchmark::State& state) {
  SimConfig config = default_config();
  const KnotList& knots = config.calibration.classes[3].perf.step_time_knots;
  int replicas = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interp(knots, replicas));
    replicas = replicas == 64 ? 16 : replicas + 1;
  }
}
BENCHMARK(BM_Interp);

void BM_SimulateOneWorkload(benchmark::State& state) {
  SimConfig config = default_config();
  config.scheduler.policy = PolicyKind(state.range(0));
  Workload workload = generate(config.generator, 1, config.calibration);
  for (auto _ : state) {
    Trace trace = simulate(config.cluster, config.scheduler, workload,
                           config.calibration);
    benchmark::DoNotOptimize(trace.records.data());
  }
}
BENCHMARK(BM_SimulateOneWorkload)
    ->DenseRange(0, 3)
    ->ArgNames({"policy"});

void BM_SimulateAndMeasure(benchmark::State& state) {
  SimConfig config = default_config();
  Workload workload = generate(config.generator, 1, config.calibration);
  for (auto _ : state) {
    Trace trace = simulate(config.cluster, config.scheduler, workload,
                           config.calibration);
    MetricsReport report = compute_metrics(trace, config.cluster);
    benchmark::DoNotOptimize(report.utilization);
  }
}
BENCHMARK(BM_SimulateAndMeasure);

void BM_SweepPoint(benchmark::State& state) {
  SimConfig config = default_config();
  SweepSpec spec{SweepVariable::SubmissionGap, {180.0}};
  for (auto _ : state) {
    auto rows = sweep_means(config, spec, int(state.range(0)), 1);
    benchmark::DoNotOptimize(rows.data());
  }
}
BENCHMARK(BM_SweepPoint)->Arg(10)->Arg(100)->ArgNames({"repeats"});

}  // namespace

BENCHMARK_MAIN();
