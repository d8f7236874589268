// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the binary exits non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "seqpipe/cost.hpp"
#include "seqpipe/json_io.hpp"
#include "seqpipe/partition.hpp"
#include "seqpipe/render.hpp"
#include "seqpipe/schedule.hpp"
#include "seqpipe/sim.hpp"
#include "seqpipe/validate.hpp"

using namespace seqpipe;

namespace {

struct Ctx {
  long long checks = 0;
  long long failure_count = 0;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failure_count;
    if (failures.size() < 6) {
      failures.push_back(what);
    } else {
      failures.back() = "(more failures suppressed)";
    }
  }
};

ScenarioConfig uniform_cfg(int pipeline, int batches, int segments, int stages = 1) {
  ScenarioConfig cfg;
  cfg.pipeline_size = pipeline;
  cfg.micro_batches = batches;
  cfg.segments = segments;
  cfg.stages_per_device = stages;
  cfg.seq_len = 16 * segments;
  cfg.cost_model = CostModel::kUniform;
  cfg.validate();
  return cfg;
}

SimReport run_even(const ScenarioConfig& cfg, ScheduleKind kind) {
  SequencePartition partition = even_partition(cfg);
  return simulate(generate(cfg, kind, partition), partition);
}

std::string describe_point(ScheduleKind kind, int pipeline, int batches, int segments, int stages) {
  std::ostringstream os;
  os << schedule_kind_name(kind) << " P=" << pipeline << " M=" << batches << " k=" << segments
     << " nv=" << stages;
  return os.str();
}

// ---------------------------------------------------------------------------
// 1. Warm-up exactness against the closed-form counts.
void criterion_warmup(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {2 * pipeline, 4 * pipeline}) {
      for (int segments : {1, 2, 4}) {
        for (int stages : {1, 2}) {
          std::vector<ScheduleKind> kinds =
              stages == 1
                  ? std::vector<ScheduleKind>{ScheduleKind::kOneFOneB, ScheduleKind::kSeq1F1B}
                  : std::vector<ScheduleKind>{ScheduleKind::kOneFOneBInterleaved,
                                              ScheduleKind::kSeq1F1BInterleaved};
          for (ScheduleKind kind : kinds) {
            if (kind == ScheduleKind::kSeq1F1BInterleaved && segments > pipeline) continue;
            ScenarioConfig cfg = uniform_cfg(pipeline, batches, segments, stages);
            Schedule schedule = generate(cfg, kind, even_partition(cfg));
            auto violations = check_warmup_formulas(schedule);
            ctx.require(violations.empty(),
                        describe_point(kind, pipeline, batches, segments, stages) + ": " +
                            violations_to_string(violations));
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 2. Uniform-cost closed form: makespan = (M + P - 1) * (tf + tb) for k = 1.
void criterion_closed_form(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {2 * pipeline, 4 * pipeline}) {
      for (Rational ratio : {Rational(2), Rational(1), Rational(3, 2)}) {
        ScenarioConfig cfg = uniform_cfg(pipeline, batches, 1);
        cfg.backward_ratio = ratio;
        SimReport report = run_even(cfg, ScheduleKind::kOneFOneB);
        Rational expected = Rational(batches + pipeline - 1) * (Rational(1) + ratio);
        ctx.require(report.makespan == expected,
                    "1f1b P=" + std::to_string(pipeline) + " M=" + std::to_string(batches) +
                        " tb=" + ratio.str() + ": makespan " + report.makespan.str() +
                        " != " + expected.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 3. Bubble reduction: exact equal-cost form and preset direction.
void criterion_bubble(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {2 * pipeline, 4 * pipeline}) {
      for (int segments : {1, 2, 4}) {
        ScenarioConfig cfg = uniform_cfg(pipeline, batches, segments);
        SimReport report = run_even(cfg, ScheduleKind::kSeq1F1B);
        Rational expected = Rational(3 * (pipeline - 1), segments);  // (P-1)(tf+tb)/k
        ctx.require(report.devices[0].idle == expected,
                    "seq1f1b P=" + std::to_string(pipeline) + " M=" + std::to_string(batches) +
                        " k=" + std::to_string(segments) + ": device-1 bubble " +
                        report.devices[0].idle.str() + " != " + expected.str());
      }
    }
  }
  for (const std::string& name : preset_names()) {
    ScenarioConfig cfg = preset_scenario(name);
    SequencePartition partition = cwp_partition(cfg);
    SimReport seq = simulate(generate(cfg, ScheduleKind::kSeq1F1B, partition), partition);
    SimReport base = simulate(generate(cfg, ScheduleKind::kOneFOneB, partition), partition);
    ctx.require(seq.aggregate_bubble_ratio < base.aggregate_bubble_ratio,
                name + ": seq1f1b bubble " + seq.aggregate_bubble_ratio.str() +
                    " !< 1f1b bubble " + base.aggregate_bubble_ratio.str());
  }
}

// ---------------------------------------------------------------------------
// 4. Memory ordering. The last device must hold every segment of one
// micro-batch when its first backward runs, so its sequence-level peak equals
// the batch-level peak there; the per-device comparison is therefore <=,
// strict on device 1 and on the per-point maximum.
void criterion_memory(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {2 * pipeline, 4 * pipeline}) {
      for (int segments : {2, 4}) {
        SimReport seq = run_even(uniform_cfg(pipeline, batches, segments), ScheduleKind::kSeq1F1B);
        SimReport base =
            run_even(uniform_cfg(pipeline, batches, segments), ScheduleKind::kOneFOneB);
        std::string point = "P=" + std::to_string(pipeline) + " M=" + std::to_string(batches) +
                            " k=" + std::to_string(segments);
        for (int d = 0; d < pipeline; ++d) {
          ctx.require(seq.devices[d].peak_memory <= base.devices[d].peak_memory,
                      point + " dev " + std::to_string(d + 1) + ": seq peak " +
                          seq.devices[d].peak_memory.str() + " > 1f1b peak " +
                          base.devices[d].peak_memory.str());
        }
        ctx.require(seq.devices[0].peak_memory < base.devices[0].peak_memory,
                    point + ": device-1 peak not strictly smaller");
        ctx.require(seq.max_peak_memory < base.max_peak_memory,
                    point + ": max peak not strictly smaller");

        if (segments <= pipeline) {
          SimReport seqi = run_even(uniform_cfg(pipeline, batches, segments, 2),
                                    ScheduleKind::kSeq1F1BInterleaved);
          SimReport basei = run_even(uniform_cfg(pipeline, batches, segments, 2),
                                     ScheduleKind::kOneFOneBInterleaved);
          for (int d = 0; d < pipeline; ++d) {
            ctx.require(seq.devices[d].peak_memory <= seqi.devices[d].peak_memory,
                        point + " dev " + std::to_string(d + 1) + ": seq1f1b > seq1f1b-i");
            ctx.require(seqi.devices[d].peak_memory <= basei.devices[d].peak_memory,
                        point + " dev " + std::to_string(d + 1) + ": seq1f1b-i > 1f1b-i");
          }
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 5. Legality: every generated schedule validates ok; dependency-inverting
// mutations are always caught.
void criterion_legality(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {1, pipeline - 1, pipeline, 2 * pipeline, 4 * pipeline}) {
      if (batches < 1) continue;
      for (int segments : {1, 2, 4}) {
        for (int stages : {1, 2}) {
          for (ScheduleKind kind : kAllScheduleKinds) {
            if (is_interleaved(kind) != (stages == 2)) continue;
            if (kind == ScheduleKind::kSeq1F1BInterleaved && segments > pipeline) continue;
            ScenarioConfig cfg = uniform_cfg(pipeline, batches, segments, stages);
            Schedule schedule = generate(cfg, kind, even_partition(cfg));
            auto violations = check_schedule(schedule);
            ctx.require(violations.empty(),
                        describe_point(kind, pipeline, batches, segments, stages) + ": " +
                            violations_to_string(violations));
          }
        }
      }
    }
  }
  for (ScheduleKind kind : kAllScheduleKinds) {
    int stages = is_interleaved(kind) ? 2 : 1;
    ScenarioConfig cfg = uniform_cfg(4, 8, 2, stages);
    Schedule schedule = generate(cfg, kind, even_partition(cfg));
    std::vector<DependencyPair> pairs = dependency_order_pairs(schedule);
    ctx.require(pairs.size() >= 100,
                std::string(schedule_kind_name(kind)) + ": too few invertible dependency pairs");
    std::uint64_t state = 20260810;
    std::set<std::size_t> chosen;
    while (chosen.size() < 100 && chosen.size() < pairs.size()) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      chosen.insert((state >> 33) % pairs.size());
    }
    for (std::size_t idx : chosen) {
      Schedule mutated = swap_order_pair(schedule, pairs[idx]);
      ctx.require(!check_schedule(mutated).empty(),
                  std::string(schedule_kind_name(kind)) + ": mutation " + std::to_string(idx) +
                      " not flagged");
    }
  }
}

// ---------------------------------------------------------------------------
// 6. Partitioner quality: never worse than even, within one-token rounding
// slack of the exhaustive optimum, and the quadratic-root example is exact.
void criterion_partitioner(Ctx& ctx) {
  struct Grid {
    int layers;
    std::int64_t hidden;
    std::int64_t params;
  };
  const std::vector<Grid> grids = {{1, 1, 0}, {2, 4, 100}, {1, 8, 10000}};

  for (int segments : {1, 2, 3, 4}) {
    for (std::int64_t n = segments; n <= 256; ++n) {
      for (const Grid& g : grids) {
        ScenarioConfig cfg;
        cfg.seq_len = n;
        cfg.segments = segments;
        cfg.layers = g.layers;
        cfg.hidden_dim = g.hidden;
        cfg.param_count = g.params;
        cfg.validate();
        SequencePartition cwp = cwp_partition(cfg);
        SequencePartition even = even_partition(cfg);
        ctx.require(cwp.imbalance <= even.imbalance,
                    "n=" + std::to_string(n) + " k=" + std::to_string(segments) +
                        ": cwp imbalance exceeds even split");
      }
    }
  }

  for (std::int64_t n : {12, 16, 24, 32, 48, 64, 96, 128, 192, 256}) {
    for (int segments : {2, 3, 4}) {
      for (const Grid& g : grids) {
        ScenarioConfig cfg;
        cfg.seq_len = n;
        cfg.segments = segments;
        cfg.layers = g.layers;
        cfg.hidden_dim = g.hidden;
        cfg.param_count = g.params;
        cfg.validate();
        SequencePartition cwp = cwp_partition(cfg);
        SequencePartition best = oracle_partition(cfg);
        Rational max_step{0};
        Rational sum{0};
        std::int64_t prefix = 0;
        for (std::size_t i = 0; i < cwp.lengths.size(); ++i) {
          std::int64_t len = cwp.lengths[i];
          max_step =
              std::max(max_step, Rational::from_parts(segment_flops(cfg, prefix, len + 1) -
                                                          segment_flops(cfg, prefix, len), 1));
          sum += Rational::from_parts(segment_flops(cfg, prefix, len), 1);
          prefix += len;
        }
        Rational slack = Rational(2) * max_step * Rational(segments) / sum;
        ctx.require(cwp.imbalance <= best.imbalance + slack,
                    "n=" + std::to_string(n) + " k=" + std::to_string(segments) + ": cwp " +
                        cwp.imbalance.str() + " > oracle " + best.imbalance.str() + " + slack " +
                        slack.str());
      }
    }
  }

  ScenarioConfig example;
  example.seq_len = 100;
  example.segments = 2;
  example.layers = 1;
  example.hidden_dim = 1;
  example.param_count = 0;
  example.validate();
  ctx.require(cwp_partition(example).lengths == std::vector<std::int64_t>{62, 38},
              "the 100-token two-way split is not [62, 38]");
}

// ---------------------------------------------------------------------------
// 7. Ablation direction: balanced partition beats the even split.
void criterion_ablation(Ctx& ctx) {
  ScenarioConfig cfg = preset_scenario("gpt-2.7b");
  {
    SequencePartition even = even_partition(cfg);
    SequencePartition cwp = cwp_partition(cfg);
    SimReport with_even = simulate(generate(cfg, ScheduleKind::kSeq1F1B, even), even);
    SimReport with_cwp = simulate(generate(cfg, ScheduleKind::kSeq1F1B, cwp), cwp);
    ctx.require(with_cwp.makespan < with_even.makespan,
                "seq1f1b: cwp makespan " + with_cwp.makespan.str() + " !< even " +
                    with_even.makespan.str());
  }
  {
    ScenarioConfig icfg = cfg;
    icfg.stages_per_device = 2;
    SequencePartition even = even_partition(icfg);
    SequencePartition cwp = cwp_partition(icfg);
    SimReport with_even = simulate(generate(icfg, ScheduleKind::kSeq1F1BInterleaved, even), even);
    SimReport with_cwp = simulate(generate(icfg, ScheduleKind::kSeq1F1BInterleaved, cwp), cwp);
    ctx.require(with_cwp.makespan < with_even.makespan,
                "seq1f1b-i: cwp makespan " + with_cwp.makespan.str() + " !< even " +
                    with_even.makespan.str());
  }
}

// ---------------------------------------------------------------------------
// 8. Zero-bubble integration reduces bubbles at equal split components.
void criterion_zero_bubble(Ctx& ctx) {
  for (int pipeline : {2, 4, 8}) {
    for (int batches : {2 * pipeline, 4 * pipeline}) {
      for (int segments : {1, 2, 4}) {
        ScenarioConfig cfg = uniform_cfg(pipeline, batches, segments);
        std::string point = "P=" + std::to_string(pipeline) + " M=" + std::to_string(batches) +
                            " k=" + std::to_string(segments);
        SimReport zb = run_even(cfg, ScheduleKind::kZB1P);
        SimReport base = run_even(cfg, ScheduleKind::kOneFOneB);
        ctx.require(zb.aggregate_bubble_ratio <= base.aggregate_bubble_ratio,
                    point + ": zb1p bubble " + zb.aggregate_bubble_ratio.str() + " > 1f1b " +
                        base.aggregate_bubble_ratio.str());
        SimReport seq_zb = run_even(cfg, ScheduleKind::kSeqZB1P);
        SimReport seq = run_even(cfg, ScheduleKind::kSeq1F1B);
        ctx.require(seq_zb.aggregate_bubble_ratio <= seq.aggregate_bubble_ratio,
                    point + ": seqzb1p bubble " + seq_zb.aggregate_bubble_ratio.str() +
                        " > seq1f1b " + seq.aggregate_bubble_ratio.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 9. Tiny instances stay within the pipeline ramp of the exhaustive optimum.
void criterion_oracle_gap(Ctx& ctx) {
  for (int pipeline : {2, 3}) {
    for (int batches : {1, 2, 3}) {
      for (int segments : {1, 2}) {
        ScenarioConfig cfg = uniform_cfg(pipeline, batches, segments);
        cfg.backward_ratio = Rational(1);  // tf = tb = 1
        SequencePartition partition = even_partition(cfg);
        Rational best = oracle_min_makespan(cfg, partition);
        for (ScheduleKind kind : {ScheduleKind::kOneFOneB, ScheduleKind::kSeq1F1B}) {
          SimReport report = simulate(generate(cfg, kind, partition), partition);
          std::string point = describe_point(kind, pipeline, batches, segments, 1);
          ctx.require(report.makespan >= best, point + ": beat the oracle (impossible)");
          Rational bound = best + Rational(2 * (pipeline - 1));
          ctx.require(report.makespan <= bound,
                      point + ": makespan " + report.makespan.str() + " > oracle " + best.str() +
                          " + ramp " + std::to_string(2 * (pipeline - 1)));
        }
      }
    }
  }
  // Degenerate single-device case: any order is work-conserving.
  ScenarioConfig solo = uniform_cfg(1, 3, 2);
  ctx.require(oracle_min_makespan(solo, even_partition(solo)) == Rational(9),
              "single-device oracle is not serial work");
}

// ---------------------------------------------------------------------------
// 10. Byte determinism of all CLI outputs.
void criterion_determinism(Ctx& ctx) {
  const std::string cli = SEQPIPE_CLI_PATH;
  const std::string base = "/tmp/seqpipe_accept_" + std::to_string(getpid());
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  auto shell = [](const std::string& cmd) { return std::system(cmd.c_str()); };

  for (int round = 0; round < 2; ++round) {
    std::string suffix = base + "_" + std::to_string(round);
    int rc = shell(cli + " simulate --preset gpt-2.7b --kind seqzb1p --partition cwp --out " +
                   suffix + ".json --emit-schedule " + suffix + ".sched.json --gantt svg" +
                   " --gantt-out " + suffix + ".svg >/dev/null 2>&1");
    ctx.require(rc == 0, "simulate run failed");
    rc = shell(cli + " simulate --preset gpt-7b --kind 1f1b --gantt ascii --gantt-out " + suffix +
               ".txt --out /dev/null >/dev/null 2>&1");
    ctx.require(rc == 0, "ascii run failed");
    rc = shell(cli + " sweep --set seq_len=64 --set cost_model=uniform" +
               " --kinds 1f1b,seq1f1b,1f1b-i --pipeline-sizes 2,4 --micro-batches 8" +
               " --segment-counts 1,2 --out " + suffix + ".csv >/dev/null 2>&1");
    ctx.require(rc == 0, "sweep run failed");
  }
  for (const char* ext : {".json", ".sched.json", ".svg", ".txt", ".csv"}) {
    std::string a = slurp(base + "_0" + ext);
    std::string b = slurp(base + "_1" + ext);
    ctx.require(!a.empty() && a == b, std::string("output ") + ext + " not byte-identical");
    std::remove((base + "_0" + ext).c_str());
    std::remove((base + "_1" + ext).c_str());
  }
}

struct CriterionSpec {
  int id;
  const char* title;
  double budget_seconds;  // 0 = no stated budget
  std::function<void(Ctx&)> fn;
};

}  // namespace

int main() {
  const std::vector<CriterionSpec> criteria = {
      {1, "warm-up exactness", 5.0, criterion_warmup},
      {2, "uniform 1F1B closed form", 0.0, criterion_closed_form},
      {3, "bubble reduction", 0.0, criterion_bubble},
      {4, "memory ordering", 0.0, criterion_memory},
      {5, "schedule legality and mutation sensitivity", 0.0, criterion_legality},
      {6, "partitioner quality", 60.0, criterion_partitioner},
      {7, "ablation direction", 0.0, criterion_ablation},
      {8, "zero-bubble direction", 0.0, criterion_zero_bubble},
      {9, "tiny-instance optimality gap", 30.0, criterion_oracle_gap},
      {10, "output determinism", 0.0, criterion_determinism},
  };

  int failed = 0;
  for (const CriterionSpec& spec : criteria) {
    Ctx ctx;
    auto start = std::chrono::steady_clock::now();
    try {
      spec.fn(ctx);
    } catch (const std::exception& e) {
      ctx.require(false, std::string("exception: ") + e.what());
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_budget = spec.budget_seconds <= 0.0 || seconds <= spec.budget_seconds;
    if (!in_budget) {
      ctx.require(false, "exceeded time budget of " + std::to_string(spec.budget_seconds) + "s");
    }
    bool ok = ctx.failure_count == 0;
    std::printf("[%s] %2d. %s (%lld checks, %.2fs)\n", ok ? "PASS" : "FAIL", spec.id, spec.title,
                ctx.checks, seconds);
    if (!ok) {
      ++failed;
      for (const std::string& msg : ctx.failures) {
        std::printf("       - %s\n", msg.c_str());
      }
    }
  }
  if (failed > 0) {
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
