// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_JSON_IO_HPP_
#define SEQPIPE_JSON_IO_HPP_

#include <cstddef>
#include <string>

#include "seqpipe/schedule.hpp"
#include "seqpipe/sim.hpp"

namespace seqpipe {

/// Schedule document: {"schema": "seqpipe.schedule.v1", "kind": ...,
/// "config": {flat config keys}, "device_orders": [[[kind, m, s, stage],
/// ...], ...]}. Serialization is canonical (sorted keys, reduced rationals),
/// so parse followed by dump reproduces the original bytes.
std::string schedule_to_json(const Schedule& schedule, int indent = 2);
Schedule schedule_from_json(const std::string& text);

/// Simulation report document. Times and memory amounts are exact rational
/// strings. memory_downsample > 0 keeps at most that many points per device
/// (uniform stride, first and last always retained).
std::string report_to_json(const SimReport& report, int indent = 2,
                           std::size_t memory_downsample = 0);

}  // namespace seqpipe

#endif  // SEQPIPE_JSON_IO_HPP_
