// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_SIM_HPP_
#define SEQPIPE_SIM_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqpipe/partition.hpp"
#include "seqpipe/rational.hpp"
#include "seqpipe/scenario.hpp"
#include "seqpipe/schedule.hpp"
#include "seqpipe/task.hpp"

namespace seqpipe {

/// Direct prerequisites of a task. Forwards need the previous stage's
/// forward (pipeline edge) and the previous segment's forward at the same
/// stage (causal edge: attention reads the keys/values of earlier tokens).
/// Backwards need the next stage's backward, the next segment's backward at
/// the same stage (gradients flow from later tokens to earlier ones), and
/// their own forward. Weight gradients only need their input gradient.
std::vector<Task> dependencies(const Task& task, const ScenarioConfig& cfg);

struct TaskTiming {
  Task task;
  Rational start{0};
  Rational end{0};
};

struct DeviceReport {
  int device = 1;
  Rational first_start{0};
  Rational last_end{0};
  Rational busy{0};
  Rational idle{0};          // within [first_start, last_end]
  Rational bubble_ratio{0};  // idle / (last_end - first_start)
  Rational idle_in_makespan{0};
  Rational bubble_ratio_in_makespan{0};
  Rational peak_memory{0};
  std::int64_t peak_allocations = 0;
  int warmup_forward_tasks = 0;  // forward tasks preceding the first backward-family task
  std::vector<std::pair<Rational, Rational>> memory_series;  // (time, resident units)
};

struct SimReport {
  ScheduleKind kind = ScheduleKind::kOneFOneB;
  ScenarioConfig config;
  std::vector<std::int64_t> partition_lengths;
  std::vector<std::vector<TaskTiming>> task_times;  // aligned with Schedule::device_orders
  Rational makespan{0};
  std::vector<DeviceReport> devices;
  Rational aggregate_bubble_ratio{0};              // sum(idle) / sum(window)
  Rational aggregate_bubble_ratio_in_makespan{0};  // sum(makespan - busy) / (P * makespan)
  Rational max_peak_memory{0};
  Rational modeled_throughput{0};  // tokens per time unit
};

struct DeadlockError : std::runtime_error {
  explicit DeadlockError(const std::string& what) : std::runtime_error(what) {}
};
struct MissingDependencyError : std::runtime_error {
  explicit MissingDependencyError(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministically executes the schedule: each device runs its order list
/// strictly in sequence; a task starts at max(device free time, dependency
/// completion + comm_latency for cross-device edges). Batch-level kinds hand
/// activations/gradients to the neighboring stage once per micro-batch (the
/// cross-stage edge binds to the unit's last task); sequence-level kinds
/// transfer per sub-sequence. A forward's completion allocates
/// activation_cost_per_token * segment tokens on its device; the matching
/// fused backward (or weight gradient, for the zero-bubble kinds) frees it on
/// completion. Throws DeadlockError when no runnable task remains,
/// MissingDependencyError when a prerequisite task is absent.
SimReport simulate(const Schedule& schedule, const SequencePartition& partition);

struct ComparisonRow {
  std::string kind;
  ScenarioConfig config;
  Rational makespan{0};
  Rational bubble_ratio{0};
  Rational max_peak_memory{0};
  Rational throughput{0};
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::string to_csv() const;
};

/// Side-by-side comparison of >= 2 reports over the same config family
/// (same seq_len and micro-batch count unless allow_mixed). The CSV includes
/// ratio columns relative to the first report.
ComparisonTable compare(const std::vector<SimReport>& reports, bool allow_mixed = false);

}  // namespace seqpipe

#endif  // SEQPIPE_SIM_HPP_
