// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_VALIDATE_HPP_
#define SEQPIPE_VALIDATE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "seqpipe/partition.hpp"
#include "seqpipe/rational.hpp"
#include "seqpipe/schedule.hpp"

namespace seqpipe {

struct Violation {
  std::string code;   // machine-readable, e.g. "completeness", "order_deadlock"
  int device = 0;     // 1-based; 0 when the violation is not device-specific
  std::string detail;
};

std::string violations_to_string(const std::vector<Violation>& violations);

/// Legality and semantics checker. Independent of the generators: it
/// re-derives the dependency rules itself and replays each device order with
/// zero-cost progression. Checks (a) completeness (exactly one forward per
/// (micro-batch, segment, stage) and exactly one fused backward, or exactly
/// one input-gradient plus one weight-gradient), (b) device orders are
/// consistent with the dependency relation (no deadlock), (c) per-micro-batch
/// segment order is ascending for forwards and descending for backwards at
/// every stage, (d) every stage accumulates exactly M*k backward units.
/// Returns an empty vector when the schedule is valid.
std::vector<Violation> check_schedule(const Schedule& schedule);

/// Verifies the warm-up counts of the four 1F1B-family kinds against their
/// closed-form formulas. Counts forwards preceding each device's first
/// backward in scheduling units; since the first steady forward also
/// precedes the first backward, the expected flat count is formula + 1
/// whenever a steady phase exists. Preconditions: 1F1B-family kind and
/// micro_batches > pipeline_size (the formulas' validity domain).
std::vector<Violation> check_warmup_formulas(const Schedule& schedule);

/// Exhaustive branch-and-bound over all dependency-legal per-device task
/// orders (fused-backward task set), returning the minimum makespan.
/// Guarded to pipeline_size <= 3, micro_batches <= 3, segments <= 2,
/// stages_per_device == 1.
Rational oracle_min_makespan(const ScenarioConfig& cfg, const SequencePartition& partition);

/// A same-device (prerequisite, dependent) position pair; swapping the two
/// positions produces a schedule with a dependency inversion.
struct DependencyPair {
  int device = 1;  // 1-based
  std::size_t prerequisite_index = 0;
  std::size_t dependent_index = 0;
};

std::vector<DependencyPair> dependency_order_pairs(const Schedule& schedule);
Schedule swap_order_pair(const Schedule& schedule, const DependencyPair& pair);

}  // namespace seqpipe

#endif  // SEQPIPE_VALIDATE_HPP_
