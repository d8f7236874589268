// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/validate.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include "seqpipe/cost.hpp"

namespace seqpipe {

std::string violations_to_string(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const Violation& v : violations) {
    os << v.code;
    if (v.device > 0) os << " [device " << v.device << "]";
    os << ": " << v.detail << '\n';
  }
  return os.str();
}

namespace {

// The checker's own statement of the execution dependencies, kept separate
// from the simulator's so the two act as cross-checks of each other.
//
// A forward at stage v continues the previous stage's forward of the same
// (micro-batch, segment) and, within a stage, needs every earlier segment's
// forward (causal attention reads the prefix keys/values). A backward needs
// the downstream stage's backward, the same-stage backward of the next
// segment (gradients accumulate from later tokens into the prefix), and its
// own forward. A weight gradient follows its input gradient.
std::vector<Task> checker_prerequisites(const Task& task, int segments, int total_stages,
                                        int pipeline) {
  std::vector<Task> prereqs;
  if (task.kind == TaskKind::kForward) {
    if (task.stage != 1) {
      prereqs.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment,
                                  task.stage - 1, pipeline));
    }
    if (task.segment != 1) {
      prereqs.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment - 1,
                                  task.stage, pipeline));
    }
    return prereqs;
  }
  if (task.kind == TaskKind::kWeightGrad) {
    prereqs.push_back(make_task(TaskKind::kInputGrad, task.micro_batch, task.segment, task.stage,
                                pipeline));
    return prereqs;
  }
  // Fused backward or input gradient.
  if (task.stage != total_stages) {
    prereqs.push_back(make_task(task.kind, task.micro_batch, task.segment, task.stage + 1, pipeline));
  }
  if (task.segment != segments) {
    prereqs.push_back(make_task(task.kind, task.micro_batch, task.segment + 1, task.stage, pipeline));
  }
  prereqs.push_back(make_task(TaskKind::kForward, task.micro_batch, task.segment, task.stage, pipeline));
  return prereqs;
}

std::string task_str(const Task& t) {
  std::ostringstream os;
  os << task_kind_name(t.kind) << "(m=" << t.micro_batch << ",s=" << t.segment
     << ",stage=" << t.stage << ")";
  return os.str();
}

using TaskKey = std::tuple<int, int, int, int>;  // kind, m, s, stage

TaskKey key_of(const Task& t) {
  return {static_cast<int>(t.kind), t.micro_batch, t.segment, t.stage};
}

bool is_backward_family(TaskKind kind) {
  return kind == TaskKind::kFusedBackward || kind == TaskKind::kInputGrad;
}

}  // namespace

std::vector<Violation> check_schedule(const Schedule& schedule) {
  std::vector<Violation> violations;
  const ScenarioConfig& cfg = schedule.config;
  const int pipeline = cfg.pipeline_size;
  const int segments = cfg.segments;
  const int batches = cfg.micro_batches;
  const int total_stages = cfg.total_stages();

  if (static_cast<int>(schedule.device_orders.size()) != pipeline) {
    violations.push_back({"device_count", 0,
                          "schedule holds " + std::to_string(schedule.device_orders.size()) +
                              " device lists, config says " + std::to_string(pipeline)});
    return violations;
  }

  // Placement and range checks, plus occurrence counting for completeness.
  std::map<TaskKey, int> occurrences;
  bool range_ok = true;
  for (int d = 1; d <= pipeline; ++d) {
    for (const Task& t : schedule.device_orders[static_cast<std::size_t>(d - 1)]) {
      if (t.micro_batch < 1 || t.micro_batch > batches || t.segment < 1 || t.segment > segments ||
          t.stage < 1 || t.stage > total_stages) {
        violations.push_back({"task_out_of_range", d, task_str(t)});
        range_ok = false;
        continue;
      }
      int owner = (t.stage - 1) % pipeline + 1;
      if (t.device != owner) {
        violations.push_back({"wrong_device_field", d,
                              task_str(t) + " carries device " + std::to_string(t.device) +
                                  ", stage map says " + std::to_string(owner)});
      }
      if (owner != d) {
        violations.push_back({"misplaced_task", d,
                              task_str(t) + " belongs to device " + std::to_string(owner)});
      }
      ++occurrences[key_of(t)];
    }
  }
  if (!range_ok) return violations;

  bool complete = true;
  auto count_of = [&occurrences](TaskKind kind, int m, int s, int v) {
    auto it = occurrences.find({static_cast<int>(kind), m, s, v});
    return it == occurrences.end() ? 0 : it->second;
  };
  for (int m = 1; m <= batches; ++m) {
    for (int s = 1; s <= segments; ++s) {
      for (int v = 1; v <= total_stages; ++v) {
        int fwd = count_of(TaskKind::kForward, m, s, v);
        int fused = count_of(TaskKind::kFusedBackward, m, s, v);
        int input = count_of(TaskKind::kInputGrad, m, s, v);
        int weight = count_of(TaskKind::kWeightGrad, m, s, v);
        std::string where = "(m=" + std::to_string(m) + ",s=" + std::to_string(s) +
                            ",stage=" + std::to_string(v) + ")";
        if (fwd != 1) {
          violations.push_back({"completeness", (v - 1) % pipeline + 1,
                                "expected exactly one forward for " + where + ", found " +
                                    std::to_string(fwd)});
          complete = false;
        }
        bool fused_ok = fused == 1 && input == 0 && weight == 0;
        bool split_ok = fused == 0 && input == 1 && weight == 1;
        if (!fused_ok && !split_ok) {
          violations.push_back({"completeness", (v - 1) % pipeline + 1,
                                "backward units for " + where + " are B=" + std::to_string(fused) +
                                    " I=" + std::to_string(input) + " W=" + std::to_string(weight) +
                                    "; expected one fused backward or one input+weight pair"});
          complete = false;
        }
      }
    }
  }

  // Per-stage gradient accumulation: M*k backward units before the end.
  for (int v = 1; v <= total_stages; ++v) {
    int units = 0;
    for (int m = 1; m <= batches; ++m) {
      for (int s = 1; s <= segments; ++s) {
        if (count_of(TaskKind::kFusedBackward, m, s, v) > 0 ||
            count_of(TaskKind::kWeightGrad, m, s, v) > 0) {
          ++units;
        }
      }
    }
    if (units != batches * segments) {
      violations.push_back({"accumulation_count", (v - 1) % pipeline + 1,
                            "stage " + std::to_string(v) + " accumulates " + std::to_string(units) +
                                " gradient units, expected " + std::to_string(batches * segments)});
    }
  }

  // Segment ordering per (device, micro-batch, stage): forwards ascend,
  // backwards descend.
  for (int d = 1; d <= pipeline; ++d) {
    std::map<std::pair<int, int>, int> last_forward_segment;
    std::map<std::pair<int, int>, int> last_backward_segment;
    for (const Task& t : schedule.device_orders[static_cast<std::size_t>(d - 1)]) {
      std::pair<int, int> key{t.micro_batch, t.stage};
      if (t.kind == TaskKind::kForward) {
        auto [it, fresh] = last_forward_segment.try_emplace(key, t.segment);
        if (!fresh) {
          if (t.segment <= it->second) {
            violations.push_back({"forward_segment_order", d,
                                  task_str(t) + " does not ascend over segment " +
                                      std::to_string(it->second)});
          }
          it->second = t.segment;
        }
      } else if (is_backward_family(t.kind)) {
        auto [it, fresh] = last_backward_segment.try_emplace(key, t.segment);
        if (!fresh) {
          if (t.segment >= it->second) {
            violations.push_back({"backward_segment_order", d,
                                  task_str(t) + " does not descend under segment " +
                                      std::to_string(it->second)});
          }
          it->second = t.segment;
        }
      }
    }
  }

  // Order consistency: replay all device orders with zero-cost progression
  // under the checker's own dependency rules. Only meaningful when the task
  // multiset is complete.
  if (complete) {
    std::map<TaskKey, bool> done;
    for (const auto& [key, count] : occurrences) done[key] = false;
    std::vector<std::size_t> cursor(static_cast<std::size_t>(pipeline), 0);
    std::size_t remaining = 0;
    for (const auto& order : schedule.device_orders) remaining += order.size();
    while (remaining > 0) {
      bool progressed = false;
      for (int d = 1; d <= pipeline; ++d) {
        const auto& order = schedule.device_orders[static_cast<std::size_t>(d - 1)];
        auto& c = cursor[static_cast<std::size_t>(d - 1)];
        while (c < order.size()) {
          const Task& t = order[c];
          bool ready = true;
          for (const Task& pre : checker_prerequisites(t, segments, total_stages, pipeline)) {
            auto it = done.find(key_of(pre));
            if (it == done.end() || !it->second) {
              ready = false;
              break;
            }
          }
          if (!ready) break;
          done[key_of(t)] = true;
          ++c;
          --remaining;
          progressed = true;
        }
      }
      if (!progressed) {
        for (int d = 1; d <= pipeline; ++d) {
          const auto& order = schedule.device_orders[static_cast<std::size_t>(d - 1)];
          std::size_t c = cursor[static_cast<std::size_t>(d - 1)];
          if (c >= order.size()) continue;
          std::ostringstream os;
          os << "task[" << c << "] " << task_str(order[c]) << " blocked on";
          for (const Task& pre : checker_prerequisites(order[c], segments, total_stages, pipeline)) {
            auto it = done.find(key_of(pre));
            if (it == done.end() || !it->second) os << ' ' << task_str(pre);
          }
          violations.push_back({"order_deadlock", d, os.str()});
        }
        break;
      }
    }
  }

  return violations;
}

std::vector<Violation> check_warmup_formulas(const Schedule& schedule) {
  const ScenarioConfig& cfg = schedule.config;
  const ScheduleKind kind = schedule.kind;
  if (kind != ScheduleKind::kOneFOneB && kind != ScheduleKind::kOneFOneBInterleaved &&
      kind != ScheduleKind::kSeq1F1B && kind != ScheduleKind::kSeq1F1BInterleaved) {
    throw std::invalid_argument("warm-up formulas apply to the 1F1B-family kinds only");
  }
  if (cfg.micro_batches <= cfg.pipeline_size) {
    throw std::invalid_argument("warm-up formulas require micro_batches > pipeline_size");
  }

  const bool seq_level = is_sequence_level(kind);
  const int unit_tasks = seq_level ? 1 : cfg.segments;
  const int total_units = cfg.micro_batches * cfg.segments * cfg.stages_per_device / unit_tasks;

  std::vector<Violation> violations;
  for (int d = 1; d <= cfg.pipeline_size; ++d) {
    int forward_tasks = 0;
    bool saw_backward = false;
    for (const Task& t : schedule.device_orders[static_cast<std::size_t>(d - 1)]) {
      if (t.kind == TaskKind::kForward) {
        ++forward_tasks;
      } else {
        saw_backward = true;
        break;
      }
    }
    int expected = 0;
    switch (kind) {
      case ScheduleKind::kOneFOneB:
        expected = warmup_1f1b(cfg.pipeline_size, cfg.micro_batches, d);
        break;
      case ScheduleKind::kSeq1F1B:
        expected = warmup_seq1f1b(cfg.pipeline_size, cfg.micro_batches, cfg.segments, d);
        break;
      case ScheduleKind::kOneFOneBInterleaved:
        expected = warmup_1f1b_interleaved(cfg.pipeline_size, cfg.stages_per_device, d);
        break;
      case ScheduleKind::kSeq1F1BInterleaved:
        expected = warmup_seq1f1b_interleaved(cfg.pipeline_size, cfg.stages_per_device,
                                              cfg.segments, d);
        break;
      default:
        break;
    }
    expected = std::min(expected, total_units);

    if (!saw_backward || forward_tasks % unit_tasks != 0) {
      violations.push_back({"warmup_count", d,
                            "device order has no steady backward or a ragged warm-up block"});
      continue;
    }
    int observed_units = forward_tasks / unit_tasks;
    // The first steady forward precedes the first backward, so a flat list
    // shows one extra unit whenever a steady phase exists.
    int expected_flat = expected + (expected < total_units ? 1 : 0);
    if (observed_units != expected_flat) {
      violations.push_back({"warmup_count", d,
                            "observed " + std::to_string(observed_units) +
                                " forward units before the first backward, formula expects " +
                                std::to_string(expected_flat) + " (warm-up " +
                                std::to_string(expected) + " + 1 steady forward)"});
    }
  }
  return violations;
}

namespace {

struct OracleTask {
  Task task;
  int device0 = 0;  // 0-based
  Rational duration{0};
  std::vector<int> prereqs;     // indices into the task array
  std::vector<int> dependents;  // inverse edges
  Rational tail{0};             // longest dependent chain including this task
};

struct OracleSearch {
  const ScenarioConfig* cfg;
  std::vector<OracleTask> tasks;
  int device_count = 0;
  std::vector<Rational> device_free;
  std::vector<Rational> device_remaining;
  std::vector<Rational> end_time;
  std::vector<char> done;
  std::vector<int> missing_prereqs;
  Rational current_max{0};
  Rational best{0};
  bool best_set = false;
  long long nodes = 0;
  static constexpr long long kNodeLimit = 200'000'000;

  void dfs(int scheduled_count) {
    if (++nodes > kNodeLimit) {
      throw std::runtime_error("oracle search exceeded its node budget");
    }
    const int n = static_cast<int>(tasks.size());
    if (scheduled_count == n) {
      if (!best_set || current_max < best) {
        best = current_max;
        best_set = true;
      }
      return;
    }
    // Lower bound: every device still owes its remaining work.
    if (best_set) {
      for (int d = 0; d < device_count; ++d) {
        if (device_free[static_cast<std::size_t>(d)] + device_remaining[static_cast<std::size_t>(d)] >= best) {
          return;
        }
      }
      if (current_max >= best) return;
    }

    // Ready tasks and their earliest starts.
    struct Candidate {
      int id;
      Rational est;
      Rational completion;
    };
    std::vector<Candidate> ready;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)] || missing_prereqs[static_cast<std::size_t>(i)] != 0) continue;
      const OracleTask& t = tasks[static_cast<std::size_t>(i)];
      Rational est = device_free[static_cast<std::size_t>(t.device0)];
      for (int pre : t.prereqs) {
        Rational arrival = end_time[static_cast<std::size_t>(pre)];
        if (tasks[static_cast<std::size_t>(pre)].device0 != t.device0) arrival += cfg->comm_latency;
        est = std::max(est, arrival);
      }
      ready.push_back({i, est, est + t.duration});
    }
    // Giffler-Thompson style branching: find the earliest completion, then
    // branch over the tasks on that device that could start before it.
    int pivot = 0;
    for (std::size_t i = 1; i < ready.size(); ++i) {
      if (ready[i].completion < ready[static_cast<std::size_t>(pivot)].completion) {
        pivot = static_cast<int>(i);
      }
    }
    int pivot_device = tasks[static_cast<std::size_t>(ready[static_cast<std::size_t>(pivot)].id)].device0;
    for (const Candidate& c : ready) {
      if (tasks[static_cast<std::size_t>(c.id)].device0 != pivot_device) continue;
      if (c.est >= ready[static_cast<std::size_t>(pivot)].completion) continue;
      OracleTask& t = tasks[static_cast<std::size_t>(c.id)];
      Rational end = c.est + t.duration;
      if (best_set && end + t.tail - t.duration >= best) continue;

      Rational saved_free = device_free[static_cast<std::size_t>(t.device0)];
      Rational saved_max = current_max;
      device_free[static_cast<std::size_t>(t.device0)] = end;
      device_remaining[static_cast<std::size_t>(t.device0)] -= t.duration;
      end_time[static_cast<std::size_t>(c.id)] = end;
      done[static_cast<std::size_t>(c.id)] = 1;
      for (int dep : t.dependents) --missing_prereqs[static_cast<std::size_t>(dep)];
      current_max = std::max(current_max, end);

      dfs(scheduled_count + 1);

      current_max = saved_max;
      for (int dep : t.dependents) ++missing_prereqs[static_cast<std::size_t>(dep)];
      done[static_cast<std::size_t>(c.id)] = 0;
      device_remaining[static_cast<std::size_t>(t.device0)] += t.duration;
      device_free[static_cast<std::size_t>(t.device0)] = saved_free;
    }
  }
};

}  // namespace

Rational oracle_min_makespan(const ScenarioConfig& cfg, const SequencePartition& partition) {
  cfg.validate();
  if (cfg.pipeline_size > 3 || cfg.micro_batches > 3 || cfg.segments > 2 ||
      cfg.stages_per_device != 1) {
    throw std::invalid_argument(
        "oracle_min_makespan is guarded to pipeline_size <= 3, micro_batches <= 3, "
        "segments <= 2, stages_per_device == 1");
  }
  OracleSearch search;
  search.cfg = &cfg;
  search.device_count = cfg.pipeline_size;
  const int total_stages = cfg.total_stages();

  std::map<TaskKey, int> ids;
  for (int m = 1; m <= cfg.micro_batches; ++m) {
    for (int s = 1; s <= cfg.segments; ++s) {
      for (int v = 1; v <= total_stages; ++v) {
        for (TaskKind kind : {TaskKind::kForward, TaskKind::kFusedBackward}) {
          Task t = make_task(kind, m, s, v, cfg.pipeline_size);
          OracleTask ot;
          ot.task = t;
          ot.device0 = t.device - 1;
          ot.duration = task_cost(cfg, partition, t);
          ids[key_of(t)] = static_cast<int>(search.tasks.size());
          search.tasks.push_back(std::move(ot));
        }
      }
    }
  }
  for (std::size_t i = 0; i < search.tasks.size(); ++i) {
    for (const Task& pre :
         checker_prerequisites(search.tasks[i].task, cfg.segments, total_stages, cfg.pipeline_size)) {
      int pre_id = ids.at(key_of(pre));
      search.tasks[i].prereqs.push_back(pre_id);
      search.tasks[static_cast<std::size_t>(pre_id)].dependents.push_back(static_cast<int>(i));
    }
  }
  // Longest dependent chain per task, for the critical-path bound. Tasks
  // are processed in reverse topological order obtained by repeated sweeps.
  {
    std::vector<char> finished(search.tasks.size(), 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < search.tasks.size(); ++i) {
        if (finished[i]) continue;
        bool deps_ready = true;
        Rational longest{0};
        for (int dep : search.tasks[i].dependents) {
          if (!finished[static_cast<std::size_t>(dep)]) {
            deps_ready = false;
            break;
          }
          longest = std::max(longest, search.tasks[static_cast<std::size_t>(dep)].tail);
        }
        if (deps_ready) {
          search.tasks[i].tail = search.tasks[i].duration + longest;
          finished[i] = 1;
          changed = true;
        }
      }
    }
  }

  search.device_free.assign(static_cast<std::size_t>(search.device_count), Rational(0));
  search.device_remaining.assign(static_cast<std::size_t>(search.device_count), Rational(0));
  search.end_time.assign(search.tasks.size(), Rational(0));
  search.done.assign(search.tasks.size(), 0);
  search.missing_prereqs.assign(search.tasks.size(), 0);
  for (std::size_t i = 0; i < search.tasks.size(); ++i) {
    search.missing_prereqs[i] = static_cast<int>(search.tasks[i].prereqs.size());
    search.device_remaining[static_cast<std::size_t>(search.tasks[i].device0)] +=
        search.tasks[i].duration;
  }
  search.dfs(0);
  if (!search.best_set) throw std::logic_error("oracle search found no schedule");
  return search.best;
}

std::vector<DependencyPair> dependency_order_pairs(const Schedule& schedule) {
  const ScenarioConfig& cfg = schedule.config;
  std::vector<DependencyPair> pairs;
  for (int d = 1; d <= cfg.pipeline_size; ++d) {
    const auto& order = schedule.device_orders[static_cast<std::size_t>(d - 1)];
    std::map<TaskKey, std::size_t> position;
    for (std::size_t i = 0; i < order.size(); ++i) position[key_of(order[i])] = i;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (const Task& pre :
           checker_prerequisites(order[i], cfg.segments, cfg.total_stages(), cfg.pipeline_size)) {
        if (pre.device != d) continue;
        auto it = position.find(key_of(pre));
        if (it == position.end()) continue;
        pairs.push_back({d, it->second, i});
      }
    }
  }
  return pairs;
}

Schedule swap_order_pair(const Schedule& schedule, const DependencyPair& pair) {
  Schedule mutated = schedule;
  auto& order = mutated.device_orders[static_cast<std::size_t>(pair.device - 1)];
  std::swap(order[pair.prerequisite_index], order[pair.dependent_index]);
  return mutated;
}

}  // namespace seqpipe
