// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_SCHEDULE_HPP_
#define SEQPIPE_SCHEDULE_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "seqpipe/partition.hpp"
#include "seqpipe/scenario.hpp"
#include "seqpipe/task.hpp"

namespace seqpipe {

enum class ScheduleKind {
  kGPipe,
  kOneFOneB,
  kOneFOneBInterleaved,
  kSeq1F1B,
  kSeq1F1BInterleaved,
  kZB1P,
  kSeqZB1P,
};

constexpr ScheduleKind kAllScheduleKinds[] = {
    ScheduleKind::kGPipe,         ScheduleKind::kOneFOneB, ScheduleKind::kOneFOneBInterleaved,
    ScheduleKind::kSeq1F1B,       ScheduleKind::kSeq1F1BInterleaved,
    ScheduleKind::kZB1P,          ScheduleKind::kSeqZB1P,
};

const char* schedule_kind_name(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Sub-sequence scheduling unit (vs whole micro-batch).
inline bool is_sequence_level(ScheduleKind kind) {
  return kind == ScheduleKind::kSeq1F1B || kind == ScheduleKind::kSeq1F1BInterleaved ||
         kind == ScheduleKind::kSeqZB1P;
}
inline bool is_interleaved(ScheduleKind kind) {
  return kind == ScheduleKind::kOneFOneBInterleaved || kind == ScheduleKind::kSeq1F1BInterleaved;
}
inline bool is_zero_bubble(ScheduleKind kind) {
  return kind == ScheduleKind::kZB1P || kind == ScheduleKind::kSeqZB1P;
}

struct UnsupportedScheduleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Warm-up forward count of each device before it enters the steady
/// one-forward-one-backward phase. Counts are in scheduling units: whole
/// micro-batches for the batch-level schedules, sub-sequences for the
/// sequence-level ones. The first steady forward also precedes the first
/// backward, so a flat task list shows warmup + 1 leading forward units
/// whenever M > P.
int warmup_1f1b(int pipeline_size, int micro_batches, int device);
int warmup_seq1f1b(int pipeline_size, int micro_batches, int segments, int device);
int warmup_1f1b_interleaved(int pipeline_size, int stages_per_device, int device);
int warmup_seq1f1b_interleaved(int pipeline_size, int stages_per_device, int segments, int device);

/// Per-device ordered task lists plus the generating config.
struct Schedule {
  ScenarioConfig config;
  ScheduleKind kind = ScheduleKind::kOneFOneB;
  std::vector<std::vector<Task>> device_orders;  // index 0 = device 1

  friend bool operator==(const Schedule&, const Schedule&);
};

/// Builds the complete per-device task order for one schedule kind. The
/// partition is needed by the zero-bubble kinds, whose weight-gradient
/// placement depends on task durations; the other kinds ignore costs.
/// Throws UnsupportedScheduleError for infeasible (kind, cfg) combinations:
/// interleaved kinds need stages_per_device >= 2, the others exactly one
/// stage per device, and seq1f1b-i additionally needs segments <=
/// pipeline_size for its warm-up count to be satisfiable.
Schedule generate(const ScenarioConfig& cfg, ScheduleKind kind, const SequencePartition& partition);

}  // namespace seqpipe

#endif  // SEQPIPE_SCHEDULE_HPP_
