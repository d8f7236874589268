// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_COST_HPP_
#define SEQPIPE_COST_HPP_

#include <cstdint>

#include "seqpipe/partition.hpp"
#include "seqpipe/rational.hpp"
#include "seqpipe/scenario.hpp"
#include "seqpipe/task.hpp"

namespace seqpipe {

/// Cumulative tokens through segment i (1-based); segment_prefix(p, k) is the
/// full sequence length. Throws on out-of-range indices.
std::int64_t segment_prefix(const SequencePartition& partition, int i);

/// Raw forward FLOPs of segment i: the linear parameter term plus the
/// causal-attention term that grows with the token prefix,
/// 2*len*param_count + 2*layers*len*prefix(i)*hidden_dim.
detail::Int128 segment_flops(const ScenarioConfig& cfg, std::int64_t prefix_before,
                             std::int64_t length);

/// Per-stage forward duration of segment i. Under kFlops this is the segment
/// FLOPs scaled by time_per_flop and divided uniformly over the total stage
/// count; under kUniform it is uniform_forward / (segments * stages_per_device).
Rational forward_cost(const ScenarioConfig& cfg, const SequencePartition& partition, int i);

/// Duration of any task: forwards use forward_cost, fused backwards scale it
/// by backward_ratio, split backwards by the bw_split_ratio components.
Rational task_cost(const ScenarioConfig& cfg, const SequencePartition& partition, const Task& task);

}  // namespace seqpipe

#endif  // SEQPIPE_COST_HPP_
