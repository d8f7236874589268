// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "seqpipe/partition.hpp"
#include "seqpipe/poq.hpp"
#include "seqpipe/scenario.hpp"
#include "seqpipe/schedule.hpp"
#include "seqpipe/sim.hpp"

namespace {

using namespace seqpipe;

ScenarioConfig preset_with_segments(int segments) {
  ScenarioConfig cfg = preset_scenario("gpt-2.7b");
  cfg.segments = segments;
  return cfg;
}

void BM_CwpPartition(benchmark::State& state) {
  ScenarioConfig cfg = preset_with_segments(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cwp_partition(cfg));
  }
}
BENCHMARK(BM_CwpPartition)->Arg(4)->Arg(16);

void BM_OraclePartition(benchmark::State& state) {
  ScenarioConfig cfg = preset_with_segments(4);
  cfg.seq_len = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_partition(cfg));
  }
}
BENCHMARK(BM_OraclePartition)->Arg(64)->Arg(128);

void BM_GenerateSeq1F1B(benchmark::State& state) {
  ScenarioConfig cfg = preset_with_segments(4);
  SequencePartition partition = cwp_partition(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(cfg, ScheduleKind::kSeq1F1B, partition));
  }
}
BENCHMARK(BM_GenerateSeq1F1B);

void BM_SimulateSeq1F1B(benchmark::State& state) {
  ScenarioConfig cfg = preset_with_segments(4);
  SequencePartition partition = cwp_partition(cfg);
  Schedule schedule = generate(cfg, ScheduleKind::kSeq1F1B, partition);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(schedule, partition));
  }
}
BENCHMARK(BM_SimulateSeq1F1B);

void BM_GenerateSeqZB1P(benchmark::State& state) {
  ScenarioConfig cfg = preset_with_segments(4);
  SequencePartition partition = cwp_partition(cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate(cfg, ScheduleKind::kSeqZB1P, partition));
  }
}
BENCHMARK(BM_GenerateSeqZB1P);

void BM_QueueChurn(benchmark::State& state) {
  for (auto _ : state) {
    PartiallyOrderedQueue q;
    for (int m = 1; m <= 64; ++m) {
      for (int s = 1; s <= 4; ++s) q.push(m, s);
    }
    while (!q.empty()) benchmark::DoNotOptimize(q.pop());
  }
}
BENCHMARK(BM_QueueChurn);

}  // namespace

BENCHMARK_MAIN();
