// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef SEQPIPE_RENDER_HPP_
#define SEQPIPE_RENDER_HPP_

#include <string>

#include "seqpipe/sim.hpp"

namespace seqpipe {

/// Timeline with one text row per device, glyphs F/B/I/W per task kind,
/// '.' for idle, and "m.s" labels inside spans wide enough to carry them.
std::string render_ascii_gantt(const SimReport& report, int width = 120);

/// SVG timeline: fixed row height, time axis scaled to the makespan, one
/// colored rect per task with an "m.s" label when it fits. The kind-to-color
/// mapping is documented in the header comment and drawn as a legend. Output
/// carries no timestamps, so identical reports render byte-identically.
std::string render_svg_gantt(const SimReport& report);

}  // namespace seqpipe

#endif  // SEQPIPE_RENDER_HPP_
