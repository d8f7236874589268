// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/render.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace seqpipe {

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

char glyph_of(TaskKind kind) {
  switch (kind) {
    case TaskKind::kForward: return 'F';
    case TaskKind::kFusedBackward: return 'B';
    case TaskKind::kInputGrad: return 'I';
    case TaskKind::kWeightGrad: return 'W';
  }
  return '?';
}

const char* color_of(TaskKind kind) {
  switch (kind) {
    case TaskKind::kForward: return "#4e79a7";
    case TaskKind::kFusedBackward: return "#f28e2b";
    case TaskKind::kInputGrad: return "#e15759";
    case TaskKind::kWeightGrad: return "#76b7b2";
  }
  return "#000000";
}

std::string task_label(const Task& t) {
  return std::to_string(t.micro_batch) + "." + std::to_string(t.segment);
}

}  // namespace

std::string render_ascii_gantt(const SimReport& report, int width) {
  if (width < 10) width = 10;
  std::ostringstream os;
  os << "kind=" << schedule_kind_name(report.kind) << " makespan=" << report.makespan.str()
     << "  [F forward, B backward, I input-grad, W weight-grad, . idle]\n";
  const double span = report.makespan.to_double();
  for (std::size_t d = 0; d < report.task_times.size(); ++d) {
    std::string row(static_cast<std::size_t>(width), '.');
    for (const TaskTiming& t : report.task_times[d]) {
      int c0 = span <= 0.0 ? 0 : static_cast<int>(t.start.to_double() / span * width);
      int c1 = span <= 0.0 ? 0 : static_cast<int>(t.end.to_double() / span * width);
      c0 = std::clamp(c0, 0, width - 1);
      c1 = std::clamp(c1, c0 + 1, width);
      for (int c = c0; c < c1; ++c) row[static_cast<std::size_t>(c)] = glyph_of(t.task.kind);
      std::string label = task_label(t.task);
      if (c1 - c0 >= static_cast<int>(label.size()) + 2) {
        int offset = c0 + (c1 - c0 - static_cast<int>(label.size())) / 2;
        for (std::size_t i = 0; i < label.size(); ++i) {
          row[static_cast<std::size_t>(offset) + i] = label[i];
        }
      }
    }
    os << "device " << (d + 1) << " |" << row << "|\n";
  }
  return os.str();
}

std::string render_svg_gantt(const SimReport& report) {
  const int row_height = 26;
  const int row_gap = 6;
  const int left_margin = 70;
  const int top_margin = 40;
  const int chart_width = 1200;
  const int device_count = static_cast<int>(report.task_times.size());
  const int height = top_margin + device_count * (row_height + row_gap) + 30;
  const double span = report.makespan.to_double();
  const double scale = span > 0.0 ? chart_width / span : 0.0;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<!-- timeline for " << schedule_kind_name(report.kind)
     << "; colors: forward " << color_of(TaskKind::kForward) << ", fused backward "
     << color_of(TaskKind::kFusedBackward) << ", input-grad " << color_of(TaskKind::kInputGrad)
     << ", weight-grad " << color_of(TaskKind::kWeightGrad) << " -->\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left_margin + chart_width + 20
     << "\" height=\"" << height << "\" font-family=\"monospace\" font-size=\"11\">\n";
  os << "<text x=\"10\" y=\"18\">" << schedule_kind_name(report.kind)
     << " P=" << report.config.pipeline_size << " M=" << report.config.micro_batches
     << " k=" << report.config.segments << " makespan=" << report.makespan.str() << "</text>\n";

  // Legend row.
  int lx = 10;
  for (TaskKind kind : {TaskKind::kForward, TaskKind::kFusedBackward, TaskKind::kInputGrad,
                        TaskKind::kWeightGrad}) {
    os << "<rect x=\"" << lx << "\" y=\"24\" width=\"10\" height=\"10\" fill=\"" << color_of(kind)
       << "\"/>\n<text x=\"" << lx + 14 << "\" y=\"33\">" << glyph_of(kind) << "</text>\n";
    lx += 40;
  }

  for (int d = 0; d < device_count; ++d) {
    int y = top_margin + d * (row_height + row_gap);
    os << "<text x=\"10\" y=\"" << y + row_height - 8 << "\">dev " << (d + 1) << "</text>\n";
    os << "<rect x=\"" << left_margin << "\" y=\"" << y << "\" width=\"" << chart_width
       << "\" height=\"" << row_height << "\" fill=\"#f0f0f0\"/>\n";
    for (const TaskTiming& t : report.task_times[static_cast<std::size_t>(d)]) {
      double x = left_margin + t.start.to_double() * scale;
      double w = (t.end.to_double() - t.start.to_double()) * scale;
      os << "<rect x=\"" << fixed2(x) << "\" y=\"" << y << "\" width=\"" << fixed2(w)
         << "\" height=\"" << row_height << "\" fill=\"" << color_of(t.task.kind)
         << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
      if (w >= 26.0) {
        os << "<text x=\"" << fixed2(x + w / 2.0) << "\" y=\"" << y + row_height - 8
           << "\" text-anchor=\"middle\" fill=\"#ffffff\">" << task_label(t.task) << "</text>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace seqpipe
