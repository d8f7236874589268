// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/json_io.hpp"

#include <json.hpp>

namespace seqpipe {

namespace {

using nlohmann::json;

json config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["pipeline_size"] = cfg.pipeline_size;
  j["stages_per_device"] = cfg.stages_per_device;
  j["micro_batches"] = cfg.micro_batches;
  j["segments"] = cfg.segments;
  j["seq_len"] = cfg.seq_len;
  j["layers"] = cfg.layers;
  j["hidden_dim"] = cfg.hidden_dim;
  j["param_count"] = cfg.param_count;
  j["backward_ratio"] = cfg.backward_ratio.str();
  j["bw_split_ratio"] = json::array({cfg.bw_input_ratio.str(), cfg.bw_weight_ratio.str()});
  j["comm_latency"] = cfg.comm_latency.str();
  j["activation_cost_per_token"] = cfg.activation_cost_per_token.str();
  j["time_per_flop"] = cfg.time_per_flop.str();
  j["cost_model"] = cost_model_name(cfg.cost_model);
  j["uniform_forward"] = cfg.uniform_forward.str();
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  ScenarioConfig cfg;
  cfg.pipeline_size = j.at("pipeline_size").get<int>();
  cfg.stages_per_device = j.at("stages_per_device").get<int>();
  cfg.micro_batches = j.at("micro_batches").get<int>();
  cfg.segments = j.at("segments").get<int>();
  cfg.seq_len = j.at("seq_len").get<std::int64_t>();
  cfg.layers = j.at("layers").get<int>();
  cfg.hidden_dim = j.at("hidden_dim").get<std::int64_t>();
  cfg.param_count = j.at("param_count").get<std::int64_t>();
  cfg.backward_ratio = Rational::parse(j.at("backward_ratio").get<std::string>());
  const auto& split = j.at("bw_split_ratio");
  cfg.bw_input_ratio = Rational::parse(split.at(0).get<std::string>());
  cfg.bw_weight_ratio = Rational::parse(split.at(1).get<std::string>());
  cfg.comm_latency = Rational::parse(j.at("comm_latency").get<std::string>());
  cfg.activation_cost_per_token =
      Rational::parse(j.at("activation_cost_per_token").get<std::string>());
  cfg.time_per_flop = Rational::parse(j.at("time_per_flop").get<std::string>());
  cfg.cost_model = parse_cost_model(j.at("cost_model").get<std::string>());
  cfg.uniform_forward = Rational::parse(j.at("uniform_forward").get<std::string>());
  return cfg;
}

}  // namespace

std::string schedule_to_json(const Schedule& schedule, int indent) {
  json j;
  j["schema"] = "seqpipe.schedule.v1";
  j["kind"] = schedule_kind_name(schedule.kind);
  j["config"] = config_to_json(schedule.config);
  json orders = json::array();
  for (const auto& order : schedule.device_orders) {
    json tasks = json::array();
    for (const Task& t : order) {
      tasks.push_back(json::array({task_kind_name(t.kind), t.micro_batch, t.segment, t.stage}));
    }
    orders.push_back(std::move(tasks));
  }
  j["device_orders"] = std::move(orders);
  return j.dump(indent) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.at("schema").get<std::string>() != "seqpipe.schedule.v1") {
    throw std::invalid_argument("unexpected schedule schema");
  }
  Schedule schedule;
  schedule.kind = parse_schedule_kind(j.at("kind").get<std::string>());
  schedule.config = config_from_json(j.at("config"));
  for (const auto& order : j.at("device_orders")) {
    std::vector<Task> tasks;
    tasks.reserve(order.size());
    for (const auto& entry : order) {
      TaskKind kind = parse_task_kind(entry.at(0).get<std::string>());
      int m = entry.at(1).get<int>();
      int s = entry.at(2).get<int>();
      int stage = entry.at(3).get<int>();
      tasks.push_back(make_task(kind, m, s, stage, schedule.config.pipeline_size));
    }
    schedule.device_orders.push_back(std::move(tasks));
  }
  return schedule;
}

std::string report_to_json(const SimReport& report, int indent, std::size_t memory_downsample) {
  json j;
  j["schema"] = "seqpipe.simreport.v1";
  j["kind"] = schedule_kind_name(report.kind);
  j["config"] = config_to_json(report.config);
  j["partition"] = report.partition_lengths;
  j["makespan"] = report.makespan.str();
  j["modeled_throughput"] = report.modeled_throughput.str();
  j["aggregate"] = {
      {"bubble_ratio", report.aggregate_bubble_ratio.str()},
      {"bubble_ratio_in_makespan", report.aggregate_bubble_ratio_in_makespan.str()},
      {"max_peak_memory", report.max_peak_memory.str()},
  };
  json devices = json::array();
  for (std::size_t d = 0; d < report.devices.size(); ++d) {
    const DeviceReport& dev = report.devices[d];
    json jd;
    jd["device"] = dev.device;
    jd["first_start"] = dev.first_start.str();
    jd["last_end"] = dev.last_end.str();
    jd["busy"] = dev.busy.str();
    jd["idle"] = dev.idle.str();
    jd["bubble_ratio"] = dev.bubble_ratio.str();
    jd["idle_in_makespan"] = dev.idle_in_makespan.str();
    jd["bubble_ratio_in_makespan"] = dev.bubble_ratio_in_makespan.str();
    jd["peak_memory"] = dev.peak_memory.str();
    jd["peak_allocations"] = dev.peak_allocations;
    jd["warmup_forward_tasks"] = dev.warmup_forward_tasks;

    json series = json::array();
    const auto& points = dev.memory_series;
    std::size_t stride = 1;
    if (memory_downsample > 0 && points.size() > memory_downsample) {
      stride = (points.size() + memory_downsample - 1) / memory_downsample;
    }
    for (std::size_t i = 0; i < points.size(); i += stride) {
      series.push_back(json::array({points[i].first.str(), points[i].second.str()}));
    }
    if (!points.empty() && stride > 1 && (points.size() - 1) % stride != 0) {
      series.push_back(
          json::array({points.back().first.str(), points.back().second.str()}));
    }
    jd["memory_series"] = std::move(series);

    json tasks = json::array();
    for (const TaskTiming& t : report.task_times[d]) {
      json jt;
      jt["kind"] = task_kind_name(t.task.kind);
      jt["m"] = t.task.micro_batch;
      jt["s"] = t.task.segment;
      jt["stage"] = t.task.stage;
      jt["start"] = t.start.str();
      jt["end"] = t.end.str();
      tasks.push_back(std::move(jt));
    }
    jd["tasks"] = std::move(tasks);
    devices.push_back(std::move(jd));
  }
  j["devices"] = std::move(devices);
  return j.dump(indent) + "\n";
}

}  // namespace seqpipe
