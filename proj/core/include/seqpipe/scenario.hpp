// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_SCENARIO_HPP_
#define SEQPIPE_SCENARIO_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqpipe/rational.hpp"

namespace seqpipe {

/// Task duration model. kFlops derives per-stage durations from the quadratic
/// attention cost model (parameter term + attention term, split uniformly
/// over stages and scaled by time_per_flop). kUniform gives every
/// (segment, stage) unit the same duration, uniform_forward/(segments *
/// stages_per_device) per forward unit, so a full micro-batch costs
/// uniform_forward per device regardless of how finely it is split.
enum class CostModel { kFlops, kUniform };

/// All pipeline/model/cost parameters for one experiment.
struct ScenarioConfig {
  int pipeline_size = 1;      // P: number of devices
  int stages_per_device = 1;  // n_v: stages owned by each device; total stages V = P * n_v
  int micro_batches = 1;      // M
  int segments = 1;           // k: sequence divisions per micro-batch
  std::int64_t seq_len = 1;   // tokens per micro-batch
  int layers = 1;             // L; 0 disables the attention cost term
  std::int64_t hidden_dim = 1;  // d; 0 disables the attention cost term
  std::int64_t param_count = 0;

  Rational backward_ratio{2};           // duration(FusedBackward) / duration(Forward)
  Rational bw_input_ratio{1};           // duration(InputGrad) / duration(Forward)
  Rational bw_weight_ratio{1};          // duration(WeightGrad) / duration(Forward)
  Rational comm_latency{0};             // per cross-device dependency edge
  Rational activation_cost_per_token{1};
  Rational time_per_flop{1};
  CostModel cost_model = CostModel::kFlops;
  Rational uniform_forward{1};          // per-device forward time per micro-batch (kUniform)

  int total_stages() const { return pipeline_size * stages_per_device; }

  /// Throws std::invalid_argument when a field violates its lower bound.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Round-robin stage ownership: device i owns stages {i, i+P, ..., i+(n_v-1)P}.
struct StageMap {
  int total_stages = 1;
  int pipeline_size = 1;
  int stages_per_device = 1;

  int device_of(int stage) const { return (stage - 1) % pipeline_size + 1; }
  std::vector<int> stages_of_device(int device) const {
    std::vector<int> stages;
    stages.reserve(static_cast<std::size_t>(stages_per_device));
    for (int s = device; s <= total_stages; s += pipeline_size) stages.push_back(s);
    return stages;
  }
};

inline StageMap stage_map(const ScenarioConfig& cfg) {
  return StageMap{cfg.total_stages(), cfg.pipeline_size, cfg.stages_per_device};
}

const char* cost_model_name(CostModel model);
CostModel parse_cost_model(std::string_view name);

/// Parses the flat key-value config format ("key = value" lines, '#'
/// comments). Unknown keys throw.
ScenarioConfig parse_scenario_text(std::string_view text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Applies one "key=value" override on top of an existing config.
void apply_scenario_override(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Bundled model presets. Unknown name throws std::invalid_argument.
ScenarioConfig preset_scenario(std::string_view name);
std::vector<std::string> preset_names();
bool is_preset_name(std::string_view name);

/// Emits the config back in the flat key-value format.
std::string scenario_to_text(const ScenarioConfig& cfg);

}  // namespace seqpipe

#endif  // SEQPIPE_SCENARIO_HPP_
