// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_PARTITION_HPP_
#define SEQPIPE_PARTITION_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "seqpipe/rational.hpp"
#include "seqpipe/scenario.hpp"

namespace seqpipe {

/// Consecutive token spans of one micro-batch: segment i covers tokens
/// (prefix(i-1), prefix(i)]. Lengths are positive and sum to the sequence
/// length. `imbalance` is (max segment cost - min segment cost) / mean
/// segment cost under the quadratic attention cost model.
struct SequencePartition {
  std::vector<std::int64_t> lengths;
  std::int64_t total = 0;
  Rational imbalance{0};

  int segment_count() const { return static_cast<int>(lengths.size()); }
};

enum class PartitionMode { kEven, kCwp, kOracle };
const char* partition_mode_name(PartitionMode mode);
PartitionMode parse_partition_mode(std::string_view name);

/// Builds a partition from explicit lengths, computing imbalance from cfg.
SequencePartition make_partition(std::vector<std::int64_t> lengths, const ScenarioConfig& cfg);

/// Splits n tokens into k near-equal spans; earlier segments receive the
/// remainder tokens. The "without computation-wise partition" baseline.
SequencePartition even_partition(std::int64_t n, int k, const ScenarioConfig& cfg);
SequencePartition even_partition(const ScenarioConfig& cfg);

/// Computation-wise partition: segment lengths whose per-segment cost under
/// the quadratic attention model is balanced. Solved by bisecting a common
/// per-segment cost target, taking each segment's positive quadratic root in
/// order, then rounding to integers by largest remainder (sum-preserving).
SequencePartition cwp_partition(const ScenarioConfig& cfg);

/// Exhaustive minimum-imbalance partition over all integer compositions.
/// Guarded to seq_len <= 512 and segments <= 4; ties break to the
/// lexicographically smallest lengths.
SequencePartition oracle_partition(const ScenarioConfig& cfg);

SequencePartition partition_for(const ScenarioConfig& cfg, PartitionMode mode);

struct BalanceReport {
  std::vector<Rational> segment_costs;  // forward cost per segment
  Rational imbalance{0};
};

BalanceReport balance_report(const SequencePartition& partition, const ScenarioConfig& cfg);

}  // namespace seqpipe

#endif  // SEQPIPE_PARTITION_HPP_
