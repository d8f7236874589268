// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/sim.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "seqpipe/cost.hpp"

namespace seqpipe {

std::vector<Task> dependencies(const Task& task, const ScenarioConfig& cfg) {
  const int total_stages = cfg.total_stages();
  const int pipeline = cfg.pipeline_size;
  std::vector<Task> deps;
  switch (task.kind) {
    case TaskKind::kForward:
      if (task.stage > 1) {
        deps.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment,
                                 task.stage - 1, pipeline));
      }
      if (task.segment > 1) {
        deps.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment - 1,
                                 task.stage, pipeline));
      }
      break;
    case TaskKind::kFusedBackward:
    case TaskKind::kInputGrad:
      if (task.stage < total_stages) {
        deps.push_back(make_task(task.kind, task.micro_batch, task.segment, task.stage + 1, pipeline));
      }
      if (task.segment < cfg.segments) {
        deps.push_back(make_task(task.kind, task.micro_batch, task.segment + 1, task.stage, pipeline));
      }
      deps.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment, task.stage, pipeline));
      break;
    case TaskKind::kWeightGrad:
      deps.push_back(make_task(TaskKind::kInputGrad, task.micro_batch, task.segment, task.stage, pipeline));
      break;
  }
  return deps;
}

namespace {

// Timing edges differ from the legality relation for the batch-level kinds:
// a batch-level stage computes a whole micro-batch before handing activations
// (or gradients) to its neighbor, so the cross-stage edge binds to the unit's
// last task. Forward units ascend over segments (last = segment k); backward
// units descend (last = segment 1). Sequence-level kinds transfer per
// sub-sequence and keep the fine-grained edges.
std::vector<Task> timing_dependencies(const Task& task, const ScenarioConfig& cfg,
                                      bool batch_atomic) {
  if (!batch_atomic) return dependencies(task, cfg);
  const int total_stages = cfg.total_stages();
  const int pipeline = cfg.pipeline_size;
  std::vector<Task> deps;
  switch (task.kind) {
    case TaskKind::kForward:
      if (task.stage > 1) {
        deps.push_back(make_task(TaskKind::kForward, task.micro_batch, cfg.segments,
                                 task.stage - 1, pipeline));
      }
      if (task.segment > 1) {
        deps.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment - 1,
                                 task.stage, pipeline));
      }
      break;
    case TaskKind::kFusedBackward:
    case TaskKind::kInputGrad:
      if (task.stage < total_stages) {
        deps.push_back(make_task(task.kind, task.micro_batch, 1, task.stage + 1, pipeline));
      }
      if (task.segment < cfg.segments) {
        deps.push_back(make_task(task.kind, task.micro_batch, task.segment + 1, task.stage, pipeline));
      }
      deps.push_back(
          make_task(TaskKind::kForward, task.micro_batch, task.segment, task.stage, pipeline));
      break;
    case TaskKind::kWeightGrad:
      deps.push_back(
          make_task(TaskKind::kInputGrad, task.micro_batch, task.segment, task.stage, pipeline));
      break;
  }
  return deps;
}

struct TaskIndex {
  int micro_batches;
  int segments;
  int total_stages;

  std::size_t capacity() const {
    return static_cast<std::size_t>(4) * micro_batches * segments * total_stages;
  }
  std::size_t id(const Task& t) const {
    std::size_t kind = static_cast<std::size_t>(t.kind);
    std::size_t linear = (static_cast<std::size_t>(t.micro_batch - 1) * segments +
                          static_cast<std::size_t>(t.segment - 1)) *
                             static_cast<std::size_t>(total_stages) +
                         static_cast<std::size_t>(t.stage - 1);
    return kind * (capacity() / 4) + linear;
  }
  bool well_formed(const Task& t) const {
    return t.micro_batch >= 1 && t.micro_batch <= micro_batches && t.segment >= 1 &&
           t.segment <= segments && t.stage >= 1 && t.stage <= total_stages;
  }
};

std::string describe(const Task& t) {
  std::ostringstream os;
  os << task_kind_name(t.kind) << "(m=" << t.micro_batch << ",s=" << t.segment
     << ",stage=" << t.stage << ")";
  return os.str();
}

}  // namespace

SimReport simulate(const Schedule& schedule, const SequencePartition& partition) {
  const ScenarioConfig& cfg = schedule.config;
  cfg.validate();
  if (partition.segment_count() != cfg.segments || partition.total != cfg.seq_len) {
    throw std::invalid_argument("partition does not match the scenario");
  }
  if (static_cast<int>(schedule.device_orders.size()) != cfg.pipeline_size) {
    throw std::invalid_argument("schedule device count does not match pipeline_size");
  }

  const TaskIndex index{cfg.micro_batches, cfg.segments, cfg.total_stages()};
  std::vector<char> present(index.capacity(), 0);
  std::vector<char> computed(index.capacity(), 0);
  std::vector<Rational> end_time(index.capacity());

  for (const auto& order : schedule.device_orders) {
    for (const Task& t : order) {
      if (!index.well_formed(t)) {
        throw std::invalid_argument("task out of range: " + describe(t));
      }
      present[index.id(t)] = 1;
    }
  }

  const int devices = cfg.pipeline_size;
  std::vector<std::size_t> cursor(static_cast<std::size_t>(devices), 0);
  std::vector<Rational> device_free(static_cast<std::size_t>(devices), Rational(0));
  SimReport report;
  report.kind = schedule.kind;
  report.config = cfg;
  report.partition_lengths = partition.lengths;
  report.task_times.resize(static_cast<std::size_t>(devices));
  for (int d = 0; d < devices; ++d) {
    report.task_times[static_cast<std::size_t>(d)].reserve(schedule.device_orders[static_cast<std::size_t>(d)].size());
  }

  // Pre-resolve dependency ids and durations per task, in device order.
  const bool batch_atomic = !is_sequence_level(schedule.kind);
  struct Resolved {
    Rational duration;
    std::vector<std::pair<std::size_t, bool>> deps;  // (id, cross_device)
  };
  std::vector<std::vector<Resolved>> resolved(static_cast<std::size_t>(devices));
  for (int d = 0; d < devices; ++d) {
    const auto& order = schedule.device_orders[static_cast<std::size_t>(d)];
    auto& out = resolved[static_cast<std::size_t>(d)];
    out.reserve(order.size());
    for (const Task& t : order) {
      Resolved r;
      r.duration = task_cost(cfg, partition, t);
      for (const Task& dep : timing_dependencies(t, cfg, batch_atomic)) {
        std::size_t dep_id = index.id(dep);
        if (!present[dep_id]) {
          throw MissingDependencyError("schedule is missing " + describe(dep) +
                                       ", required by " + describe(t));
        }
        r.deps.emplace_back(dep_id, dep.device != t.device);
      }
      out.push_back(std::move(r));
    }
  }

  std::size_t remaining = 0;
  for (const auto& order : schedule.device_orders) remaining += order.size();

  while (remaining > 0) {
    bool progressed = false;
    for (int d = 0; d < devices; ++d) {
      const auto& order = schedule.device_orders[static_cast<std::size_t>(d)];
      auto& c = cursor[static_cast<std::size_t>(d)];
      while (c < order.size()) {
        const Task& t = order[c];
        const Resolved& r = resolved[static_cast<std::size_t>(d)][c];
        bool ready = true;
        Rational ready_time = device_free[static_cast<std::size_t>(d)];
        for (const auto& [dep_id, cross] : r.deps) {
          if (!computed[dep_id]) {
            ready = false;
            break;
          }
          Rational arrival = cross ? end_time[dep_id] + cfg.comm_latency : end_time[dep_id];
          ready_time = std::max(ready_time, arrival);
        }
        if (!ready) break;
        Rational start = ready_time;
        Rational end = start + r.duration;
        device_free[static_cast<std::size_t>(d)] = end;
        std::size_t id = index.id(t);
        computed[id] = 1;
        end_time[id] = end;
        report.task_times[static_cast<std::size_t>(d)].push_back({t, start, end});
        ++c;
        --remaining;
        progressed = true;
      }
    }
    if (!progressed && remaining > 0) {
      std::ostringstream os;
      os << "deadlock: no runnable task; blocked front tasks:";
      for (int d = 0; d < devices; ++d) {
        const auto& order = schedule.device_orders[static_cast<std::size_t>(d)];
        std::size_t c = cursor[static_cast<std::size_t>(d)];
        if (c >= order.size()) continue;
        os << " device " << (d + 1) << " waits on " << describe(order[c]) << " needing";
        for (const Task& dep : timing_dependencies(order[c], cfg, batch_atomic)) {
          if (!computed[index.id(dep)]) os << ' ' << describe(dep);
        }
        os << ';';
      }
      throw DeadlockError(os.str());
    }
  }

  // Makespan and per-device aggregates.
  Rational makespan{0};
  for (const auto& timings : report.task_times) {
    for (const auto& t : timings) makespan = std::max(makespan, t.end);
  }
  report.makespan = makespan;

  Rational total_idle{0};
  Rational total_window{0};
  Rational total_idle_in_makespan{0};
  for (int d = 0; d < devices; ++d) {
    const auto& timings = report.task_times[static_cast<std::size_t>(d)];
    DeviceReport dev;
    dev.device = d + 1;
    if (!timings.empty()) {
      dev.first_start = timings.front().start;
      dev.last_end = timings.back().end;
      for (const auto& t : timings) dev.busy += t.end - t.start;
      Rational window = dev.last_end - dev.first_start;
      dev.idle = window - dev.busy;
      dev.bubble_ratio = window.is_zero() ? Rational(0) : dev.idle / window;
      dev.idle_in_makespan = makespan - dev.busy;
      dev.bubble_ratio_in_makespan =
          makespan.is_zero() ? Rational(0) : dev.idle_in_makespan / makespan;
      total_idle += dev.idle;
      total_window += window;
      total_idle_in_makespan += dev.idle_in_makespan;
      for (const auto& t : timings) {
        if (t.task.kind == TaskKind::kForward) {
          ++dev.warmup_forward_tasks;
        } else {
          break;
        }
      }
    }
    report.devices.push_back(std::move(dev));
  }
  report.aggregate_bubble_ratio = total_window.is_zero() ? Rational(0) : total_idle / total_window;
  report.aggregate_bubble_ratio_in_makespan =
      makespan.is_zero() ? Rational(0)
                         : total_idle_in_makespan / (Rational(devices) * makespan);

  // Activation residency: allocate on forward completion, free when the
  // fused backward (or the weight gradient, when the backward is split)
  // completes. Events are folded per device into a piecewise-constant series.
  const bool frees_on_weight = is_zero_bubble(schedule.kind);
  for (int d = 0; d < devices; ++d) {
    std::map<Rational, std::pair<Rational, std::int64_t>> deltas;  // time -> (units, count)
    for (const auto& t : report.task_times[static_cast<std::size_t>(d)]) {
      Rational amount = cfg.activation_cost_per_token *
                        Rational(partition.lengths[static_cast<std::size_t>(t.task.segment - 1)]);
      if (t.task.kind == TaskKind::kForward) {
        auto& slot = deltas[t.end];
        slot.first += amount;
        slot.second += 1;
      } else if ((!frees_on_weight && t.task.kind == TaskKind::kFusedBackward) ||
                 (frees_on_weight && t.task.kind == TaskKind::kWeightGrad)) {
        auto& slot = deltas[t.end];
        slot.first -= amount;
        slot.second -= 1;
      }
    }
    DeviceReport& dev = report.devices[static_cast<std::size_t>(d)];
    Rational level{0};
    std::int64_t live = 0;
    dev.memory_series.emplace_back(Rational(0), Rational(0));
    for (const auto& [time, delta] : deltas) {
      level += delta.first;
      live += delta.second;
      if (level.is_negative()) {
        throw std::logic_error("negative activation residency on device " + std::to_string(d + 1));
      }
      dev.peak_memory = std::max(dev.peak_memory, level);
      dev.peak_allocations = std::max(dev.peak_allocations, live);
      dev.memory_series.emplace_back(time, level);
    }
    report.max_peak_memory = std::max(report.max_peak_memory, dev.peak_memory);
  }

  report.modeled_throughput =
      makespan.is_zero() ? Rational(0)
                         : Rational(std::int64_t(cfg.micro_batches) * cfg.seq_len) / makespan;
  return report;
}

ComparisonTable compare(const std::vector<SimReport>& reports, bool allow_mixed) {
  if (reports.size() < 2) {
    throw std::invalid_argument("compare needs at least two reports");
  }
  if (!allow_mixed) {
    for (const SimReport& r : reports) {
      if (r.config.seq_len != reports.front().config.seq_len ||
          r.config.micro_batches != reports.front().config.micro_batches) {
        throw std::invalid_argument(
            "reports cover different workloads (seq_len/micro_batches); pass allow_mixed to override");
      }
    }
  }
  ComparisonTable table;
  for (const SimReport& r : reports) {
    ComparisonRow row;
    row.kind = schedule_kind_name(r.kind);
    row.config = r.config;
    row.makespan = r.makespan;
    row.bubble_ratio = r.aggregate_bubble_ratio;
    row.max_peak_memory = r.max_peak_memory;
    row.throughput = r.modeled_throughput;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os << "kind,pipeline_size,stages_per_device,micro_batches,segments,seq_len,"
        "makespan,bubble_ratio,max_peak_memory,throughput,"
        "makespan_vs_first,bubble_vs_first,memory_vs_first,throughput_vs_first\n";
  auto ratio_or_empty = [](const Rational& value, const Rational& base) -> std::string {
    if (base.is_zero()) return "";
    return format_decimal(value / base, 6);
  };
  for (const ComparisonRow& row : rows) {
    const ComparisonRow& first = rows.front();
    os << row.kind << ',' << row.config.pipeline_size << ',' << row.config.stages_per_device << ','
       << row.config.micro_batches << ',' << row.config.segments << ',' << row.config.seq_len << ','
       << format_decimal(row.makespan, 6) << ',' << format_decimal(row.bubble_ratio, 6) << ','
       << format_decimal(row.max_peak_memory, 6) << ',' << format_decimal(row.throughput, 6) << ','
       << ratio_or_empty(row.makespan, first.makespan) << ','
       << ratio_or_empty(row.bubble_ratio, first.bubble_ratio) << ','
       << ratio_or_empty(row.max_peak_memory, first.max_peak_memory) << ','
       << ratio_or_empty(row.throughput, first.throughput) << '\n';
  }
  return os.str();
}

}  // namespace seqpipe
