// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/schedule.hpp"

#include <algorithm>
#include <utility>

#include "seqpipe/cost.hpp"
#include "seqpipe/poq.hpp"
#include "seqpipe/sim.hpp"

namespace seqpipe {

const char* schedule_kind_name(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kGPipe: return "gpipe";
    case ScheduleKind::kOneFOneB: return "1f1b";
    case ScheduleKind::kOneFOneBInterleaved: return "1f1b-i";
    case ScheduleKind::kSeq1F1B: return "seq1f1b";
    case ScheduleKind::kSeq1F1BInterleaved: return "seq1f1b-i";
    case ScheduleKind::kZB1P: return "zb1p";
    case ScheduleKind::kSeqZB1P: return "seqzb1p";
  }
  return "?";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ScheduleKind kind : kAllScheduleKinds) {
    if (lower == schedule_kind_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown schedule kind '" + std::string(name) + "'");
}

int warmup_1f1b(int pipeline_size, int micro_batches, int device) {
  if (device < 1 || device > pipeline_size) throw std::out_of_range("device index out of range");
  if (micro_batches > pipeline_size) return pipeline_size - device;
  return micro_batches;
}

int warmup_seq1f1b(int pipeline_size, int micro_batches, int segments, int device) {
  if (device < 1 || device > pipeline_size) throw std::out_of_range("device index out of range");
  if (micro_batches > pipeline_size) return pipeline_size - device - 1 + segments;
  return micro_batches;
}

int warmup_1f1b_interleaved(int pipeline_size, int stages_per_device, int device) {
  if (device < 1 || device > pipeline_size) throw std::out_of_range("device index out of range");
  return (pipeline_size - device) * 2 + (stages_per_device - 1) * pipeline_size;
}

int warmup_seq1f1b_interleaved(int pipeline_size, int stages_per_device, int segments, int device) {
  if (device < 1 || device > pipeline_size) throw std::out_of_range("device index out of range");
  return (pipeline_size - device) * 2 + (stages_per_device - 1) * pipeline_size + segments - 1;
}

bool operator==(const Schedule& a, const Schedule& b) {
  return a.config == b.config && a.kind == b.kind && a.device_orders == b.device_orders;
}

namespace {

/// Batch-level kinds schedule whole micro-batches (k consecutive segment
/// tasks per unit); sequence-level kinds schedule single sub-sequences.
std::vector<Task> noninterleaved_device_order(const ScenarioConfig& cfg, ScheduleKind kind,
                                              int device) {
  const int pipeline = cfg.pipeline_size;
  const int batches = cfg.micro_batches;
  const int segments = cfg.segments;
  const bool seq_level = is_sequence_level(kind);
  const TaskKind backward_kind =
      is_zero_bubble(kind) ? TaskKind::kInputGrad : TaskKind::kFusedBackward;
  const int stage = device;
  const int total_units = seq_level ? batches * segments : batches;

  // Below the saturation point (M <= P) the 1F1B family degrades to
  // GPipe-like behavior: every forward precedes the first backward.
  int warmup = total_units;
  if (kind != ScheduleKind::kGPipe && batches > pipeline) {
    warmup = seq_level ? warmup_seq1f1b(pipeline, batches, segments, device)
                       : warmup_1f1b(pipeline, batches, device);
  }
  warmup = std::min(warmup, total_units);

  std::vector<Task> order;
  order.reserve(static_cast<std::size_t>(total_units) * 2 * (seq_level ? 1 : segments));
  PartiallyOrderedQueue queue;
  int forward_cursor = 0;

  auto emit_forward_unit = [&] {
    if (seq_level) {
      int m = forward_cursor / segments + 1;
      int s = forward_cursor % segments + 1;
      order.push_back(make_task(TaskKind::kForward, m, s, stage, pipeline));
      queue.push(m, s);
    } else {
      int m = forward_cursor + 1;
      for (int s = 1; s <= segments; ++s) {
        order.push_back(make_task(TaskKind::kForward, m, s, stage, pipeline));
        queue.push(m, s);
      }
    }
    ++forward_cursor;
  };
  auto emit_backward_unit = [&] {
    int pops = seq_level ? 1 : segments;
    for (int p = 0; p < pops; ++p) {
      auto [m, s] = queue.pop();
      order.push_back(make_task(backward_kind, m, s, stage, pipeline));
    }
  };

  for (int u = 0; u < warmup; ++u) emit_forward_unit();
  for (int it = 0; it < total_units - warmup; ++it) {
    emit_forward_unit();
    emit_backward_unit();
  }
  while (!queue.empty()) {
    auto [m, s] = queue.pop();
    order.push_back(make_task(backward_kind, m, s, stage, pipeline));
  }
  return order;
}

struct Unit {
  int micro_batch;
  int segment;  // 0 for whole-micro-batch units
};

/// Interleaved unit stream: consecutive windows of P units, each window
/// visited once per stage chunk (ascending for forwards, descending for
/// backwards) before advancing. Each device rotates its stage context after
/// P consecutive same-direction units.
std::vector<std::pair<Unit, int>> interleaved_stream(const std::vector<Unit>& flat, int pipeline,
                                                     int chunks, bool descending_chunks) {
  std::vector<std::pair<Unit, int>> out;
  out.reserve(flat.size() * static_cast<std::size_t>(chunks));
  for (std::size_t w0 = 0; w0 < flat.size(); w0 += static_cast<std::size_t>(pipeline)) {
    std::size_t w1 = std::min(w0 + static_cast<std::size_t>(pipeline), flat.size());
    for (int c = 0; c < chunks; ++c) {
      int chunk = descending_chunks ? chunks - 1 - c : c;
      for (std::size_t u = w0; u < w1; ++u) out.emplace_back(flat[u], chunk);
    }
  }
  return out;
}

std::vector<Task> interleaved_device_order(const ScenarioConfig& cfg, ScheduleKind kind,
                                           int device) {
  const int pipeline = cfg.pipeline_size;
  const int batches = cfg.micro_batches;
  const int segments = cfg.segments;
  const int chunks = cfg.stages_per_device;
  const bool seq_level = is_sequence_level(kind);

  std::vector<Unit> forward_flat;
  std::vector<Unit> backward_flat;
  if (seq_level) {
    for (int m = 1; m <= batches; ++m) {
      for (int s = 1; s <= segments; ++s) forward_flat.push_back({m, s});
      for (int s = segments; s >= 1; --s) backward_flat.push_back({m, s});
    }
  } else {
    for (int m = 1; m <= batches; ++m) {
      forward_flat.push_back({m, 0});
      backward_flat.push_back({m, 0});
    }
  }
  auto forward_stream = interleaved_stream(forward_flat, pipeline, chunks, false);
  auto backward_stream = interleaved_stream(backward_flat, pipeline, chunks, true);
  const int total_units = static_cast<int>(forward_stream.size());

  int warmup = seq_level ? warmup_seq1f1b_interleaved(pipeline, chunks, segments, device)
                         : warmup_1f1b_interleaved(pipeline, chunks, device);
  warmup = std::min(warmup, total_units);

  std::vector<Task> order;
  int forward_cursor = 0;
  int backward_cursor = 0;

  auto emit_forward_unit = [&] {
    auto [unit, chunk] = forward_stream[static_cast<std::size_t>(forward_cursor++)];
    int stage = device + chunk * pipeline;
    if (seq_level) {
      order.push_back(make_task(TaskKind::kForward, unit.micro_batch, unit.segment, stage, pipeline));
    } else {
      for (int s = 1; s <= segments; ++s) {
        order.push_back(make_task(TaskKind::kForward, unit.micro_batch, s, stage, pipeline));
      }
    }
  };
  auto emit_backward_unit = [&] {
    auto [unit, chunk] = backward_stream[static_cast<std::size_t>(backward_cursor++)];
    int stage = device + chunk * pipeline;
    if (seq_level) {
      order.push_back(
          make_task(TaskKind::kFusedBackward, unit.micro_batch, unit.segment, stage, pipeline));
    } else {
      for (int s = segments; s >= 1; --s) {
        order.push_back(make_task(TaskKind::kFusedBackward, unit.micro_batch, s, stage, pipeline));
      }
    }
  };

  for (int u = 0; u < warmup; ++u) emit_forward_unit();
  for (int it = 0; it < total_units - warmup; ++it) {
    emit_forward_unit();
    emit_backward_unit();
  }
  while (backward_cursor < total_units) emit_backward_unit();
  return order;
}

/// Weight-gradient placement for the zero-bubble kinds: simulate the
/// forward/input-gradient skeleton, then slot each weight gradient into the
/// earliest idle gap it fits once its input gradient is done, deferring the
/// rest to a back-to-back tail after the last skeleton task.
Schedule fill_weight_gradients(Schedule base, const SequencePartition& partition) {
  const ScenarioConfig& cfg = base.config;
  SimReport report = simulate(base, partition);

  Schedule filled = base;
  for (std::size_t d = 0; d < base.device_orders.size(); ++d) {
    const auto& timings = report.task_times[d];
    if (timings.empty()) continue;

    struct PendingWeight {
      Rational available;  // input gradient completion
      Rational duration;
      Task task;
      std::size_t position;
      bool placed = false;
    };
    std::vector<PendingWeight> pending;
    for (std::size_t i = 0; i < timings.size(); ++i) {
      const Task& t = timings[i].task;
      if (t.kind != TaskKind::kInputGrad) continue;
      Task weight = t;
      weight.kind = TaskKind::kWeightGrad;
      pending.push_back(
          {timings[i].end, task_cost(cfg, partition, weight), weight, i, false});
    }
    std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      if (a.available != b.available) return a.available < b.available;
      return a.position < b.position;
    });

    struct PlacedTask {
      Rational start;
      Task task;
    };
    std::vector<PlacedTask> placed;
    placed.reserve(pending.size());

    auto try_fill_gap = [&](Rational gap_start, const Rational& gap_end) {
      Rational cursor = gap_start;
      while (true) {
        PendingWeight* best = nullptr;
        Rational best_start{0};
        for (auto& w : pending) {
          if (w.placed) continue;
          Rational start = std::max(cursor, w.available);
          if (start + w.duration > gap_end) continue;
          best = &w;
          best_start = start;
          break;  // pending is sorted by availability; first fit is earliest
        }
        if (best == nullptr) break;
        best->placed = true;
        placed.push_back({best_start, best->task});
        cursor = best_start + best->duration;
      }
    };

    for (std::size_t i = 1; i < timings.size(); ++i) {
      if (timings[i].start > timings[i - 1].end) {
        try_fill_gap(timings[i - 1].end, timings[i].start);
      }
    }
    Rational tail = timings.back().end;
    for (auto& w : pending) {
      if (w.placed) continue;
      Rational start = std::max(tail, w.available);
      placed.push_back({start, w.task});
      tail = start + w.duration;
    }

    // Merge skeleton and weight tasks by start time. Starts are pairwise
    // distinct: weights fit strictly inside gaps or follow the tail.
    struct Slot {
      Rational start;
      Task task;
    };
    std::vector<Slot> slots;
    slots.reserve(timings.size() + placed.size());
    for (const auto& t : timings) slots.push_back({t.start, t.task});
    for (const auto& p : placed) slots.push_back({p.start, p.task});
    std::stable_sort(slots.begin(), slots.end(),
                     [](const Slot& a, const Slot& b) { return a.start < b.start; });
    std::vector<Task> order;
    order.reserve(slots.size());
    for (const auto& s : slots) order.push_back(s.task);
    filled.device_orders[d] = std::move(order);
  }
  return filled;
}

}  // namespace

Schedule generate(const ScenarioConfig& cfg, ScheduleKind kind, const SequencePartition& partition) {
  cfg.validate();
  if (partition.segment_count() != cfg.segments || partition.total != cfg.seq_len) {
    throw std::invalid_argument("partition does not match the scenario (segments/seq_len)");
  }
  if (is_interleaved(kind)) {
    if (cfg.stages_per_device < 2) {
      throw UnsupportedScheduleError(std::string(schedule_kind_name(kind)) +
                                     " requires stages_per_device >= 2");
    }
    // The interleaved warm-up count gives the last device (P-1)*... + k - 1
    // slots before its first backward, but that backward needs a full
    // micro-batch forwarded through every stage chunk first, which takes
    // stages_per_device * k units. No schedule satisfies both when k > P.
    if (kind == ScheduleKind::kSeq1F1BInterleaved && cfg.segments > cfg.pipeline_size) {
      throw UnsupportedScheduleError(
          "seq1f1b-i requires segments <= pipeline_size (warm-up formula infeasible)");
    }
  } else if (cfg.stages_per_device != 1) {
    throw UnsupportedScheduleError(std::string(schedule_kind_name(kind)) +
                                   " requires stages_per_device == 1");
  }

  Schedule schedule;
  schedule.config = cfg;
  schedule.kind = kind;
  schedule.device_orders.resize(static_cast<std::size_t>(cfg.pipeline_size));
  for (int device = 1; device <= cfg.pipeline_size; ++device) {
    schedule.device_orders[static_cast<std::size_t>(device - 1)] =
        is_interleaved(kind) ? interleaved_device_order(cfg, kind, device)
                             : noninterleaved_device_order(cfg, kind, device);
  }
  if (is_zero_bubble(kind)) {
    schedule = fill_weight_gradients(std::move(schedule), partition);
  }
  return schedule;
}

}  // namespace seqpipe
