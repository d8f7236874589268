// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/cost.hpp"

#include <stdexcept>

namespace seqpipe {

std::int64_t segment_prefix(const SequencePartition& partition, int i) {
  if (i < 1 || i > partition.segment_count()) {
    throw std::out_of_range("segment index " + std::to_string(i) + " out of range [1, " +
                            std::to_string(partition.segment_count()) + "]");
  }
  std::int64_t sum = 0;
  for (int j = 0; j < i; ++j) sum += partition.lengths[static_cast<std::size_t>(j)];
  return sum;
}

detail::Int128 segment_flops(const ScenarioConfig& cfg, std::int64_t prefix_before,
                             std::int64_t length) {
  detail::Int128 prefix_through = detail::Int128(prefix_before) + length;
  detail::Int128 param_term = detail::Int128(2) * length * cfg.param_count;
  detail::Int128 attn_term = detail::Int128(2) * cfg.layers * length * prefix_through * cfg.hidden_dim;
  return param_term + attn_term;
}

Rational forward_cost(const ScenarioConfig& cfg, const SequencePartition& partition, int i) {
  if (i < 1 || i > partition.segment_count()) {
    throw std::out_of_range("segment index out of range");
  }
  if (cfg.cost_model == CostModel::kUniform) {
    return cfg.uniform_forward / Rational(std::int64_t(cfg.segments) * cfg.stages_per_device);
  }
  std::int64_t prefix_before = segment_prefix(partition, i) - partition.lengths[static_cast<std::size_t>(i - 1)];
  detail::Int128 flops = segment_flops(cfg, prefix_before, partition.lengths[static_cast<std::size_t>(i - 1)]);
  Rational per_stage = Rational::from_parts(flops, cfg.total_stages());
  Rational cost = per_stage * cfg.time_per_flop;
  if (!cost.is_positive()) {
    throw std::domain_error("forward cost is not positive; the cost model is degenerate "
                            "(layers*hidden_dim = 0 and param_count = 0)");
  }
  return cost;
}

Rational task_cost(const ScenarioConfig& cfg, const SequencePartition& partition, const Task& task) {
  Rational fwd = forward_cost(cfg, partition, task.segment);
  switch (task.kind) {
    case TaskKind::kForward: return fwd;
    case TaskKind::kFusedBackward: return fwd * cfg.backward_ratio;
    case TaskKind::kInputGrad: return fwd * cfg.bw_input_ratio;
    case TaskKind::kWeightGrad: return fwd * cfg.bw_weight_ratio;
  }
  throw std::logic_error("unreachable task kind");
}

}  // namespace seqpipe
