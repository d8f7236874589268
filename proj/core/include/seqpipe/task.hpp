// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_TASK_HPP_
#define SEQPIPE_TASK_HPP_

#include <compare>
#include <string>

namespace seqpipe {

enum class TaskKind {
  kForward,
  kFusedBackward,  // combined input+weight gradient pass
  kInputGrad,      // gradient w.r.t. the stage input (zero-bubble split)
  kWeightGrad,     // gradient w.r.t. the stage weights (zero-bubble split)
};

inline const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kForward: return "F";
    case TaskKind::kFusedBackward: return "B";
    case TaskKind::kInputGrad: return "I";
    case TaskKind::kWeightGrad: return "W";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& name);

/// One schedulable unit: a forward, fused backward, input-gradient or
/// weight-gradient computation for (micro_batch, segment) at one stage.
/// All indices are 1-based. `device` is redundant with `stage` under the
/// round-robin stage map and is kept for serialization and validation.
struct Task {
  TaskKind kind = TaskKind::kForward;
  int micro_batch = 1;
  int segment = 1;
  int stage = 1;
  int device = 1;

  friend auto operator<=>(const Task&, const Task&) = default;
};

inline int device_of_stage(int stage, int pipeline_size) {
  return (stage - 1) % pipeline_size + 1;
}

inline Task make_task(TaskKind kind, int micro_batch, int segment, int stage, int pipeline_size) {
  return Task{kind, micro_batch, segment, stage, device_of_stage(stage, pipeline_size)};
}

}  // namespace seqpipe

#endif  // SEQPIPE_TASK_HPP_
