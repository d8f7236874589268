// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "seqpipe/task.hpp"

namespace seqpipe {

TaskKind parse_task_kind(const std::string& name) {
  if (name == "F") return TaskKind::kForward;
  if (name == "B") return TaskKind::kFusedBackward;
  if (name == "I") return TaskKind::kInputGrad;
  if (name == "W") return TaskKind::kWeightGrad;
  throw std::invalid_argument("unknown task kind '" + name + "'");
}

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid scenario: ") + what);
  };
  require(pipeline_size >= 1, "pipeline_size must be >= 1");
  require(stages_per_device >= 1, "stages_per_device must be >= 1");
  require(micro_batches >= 1, "micro_batches must be >= 1");
  require(segments >= 1, "segments must be >= 1");
  require(seq_len >= segments, "seq_len must be >= segments (every segment non-empty)");
  require(layers >= 0, "layers must be >= 0");
  require(hidden_dim >= 0, "hidden_dim must be >= 0");
  require(param_count >= 0, "param_count must be >= 0");
  require(backward_ratio.is_positive(), "backward_ratio must be positive");
  require(bw_input_ratio.is_positive(), "bw_split_ratio components must be positive");
  require(bw_weight_ratio.is_positive(), "bw_split_ratio components must be positive");
  require(!comm_latency.is_negative(), "comm_latency must be non-negative");
  require(activation_cost_per_token.is_positive(), "activation_cost_per_token must be positive");
  require(time_per_flop.is_positive(), "time_per_flop must be positive");
  require(uniform_forward.is_positive(), "uniform_forward must be positive");
}

const char* cost_model_name(CostModel model) {
  return model == CostModel::kFlops ? "flops" : "uniform";
}

CostModel parse_cost_model(std::string_view name) {
  if (name == "flops") return CostModel::kFlops;
  if (name == "uniform") return CostModel::kUniform;
  throw std::invalid_argument("unknown cost_model '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view key, std::string_view value) {
  try {
    std::size_t consumed = 0;
    std::string text(value);
    std::int64_t v = std::stoll(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + std::string(key) + "': expected integer, got '" +
                                std::string(value) + "'");
  }
}

}  // namespace

void apply_scenario_override(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "pipeline_size") {
    cfg.pipeline_size = static_cast<int>(parse_int(key, value));
  } else if (key == "stages_per_device") {
    cfg.stages_per_device = static_cast<int>(parse_int(key, value));
  } else if (key == "micro_batches") {
    cfg.micro_batches = static_cast<int>(parse_int(key, value));
  } else if (key == "segments") {
    cfg.segments = static_cast<int>(parse_int(key, value));
  } else if (key == "seq_len") {
    cfg.seq_len = parse_int(key, value);
  } else if (key == "layers") {
    cfg.layers = static_cast<int>(parse_int(key, value));
  } else if (key == "hidden_dim") {
    cfg.hidden_dim = parse_int(key, value);
  } else if (key == "param_count") {
    cfg.param_count = parse_int(key, value);
  } else if (key == "backward_ratio") {
    cfg.backward_ratio = Rational::parse(value);
  } else if (key == "bw_split_ratio") {
    auto comma = value.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("bw_split_ratio expects 'input,weight'");
    }
    cfg.bw_input_ratio = Rational::parse(trim(value.substr(0, comma)));
    cfg.bw_weight_ratio = Rational::parse(trim(value.substr(comma + 1)));
  } else if (key == "comm_latency") {
    cfg.comm_latency = Rational::parse(value);
  } else if (key == "activation_cost_per_token") {
    cfg.activation_cost_per_token = Rational::parse(value);
  } else if (key == "time_per_flop") {
    cfg.time_per_flop = Rational::parse(value);
  } else if (key == "cost_model") {
    cfg.cost_model = parse_cost_model(value);
  } else if (key == "uniform_forward") {
    cfg.uniform_forward = Rational::parse(value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

ScenarioConfig parse_scenario_text(std::string_view text) {
  ScenarioConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_scenario_override(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

namespace {

struct Preset {
  const char* name;
  int pipeline_size;
  int layers;
  std::int64_t hidden_dim;
  std::int64_t seq_len;
  int micro_batches;
  std::int64_t param_count;
};

// GPT model configurations: PP size, layer count, hidden size, the smallest
// published sequence length and micro-batch count per model scale.
constexpr Preset kPresets[] = {
    {"gpt-2.7b", 8, 32, 2560, 16384, 32, 2'700'000'000LL},
    {"gpt-7b", 4, 32, 4096, 32768, 16, 7'000'000'000LL},
    {"gpt-13b", 4, 40, 5120, 32768, 16, 13'000'000'000LL},
    {"gpt-30b", 8, 64, 6144, 32768, 32, 30'000'000'000LL},
};

}  // namespace

ScenarioConfig preset_scenario(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (name == p.name) {
      ScenarioConfig cfg;
      cfg.pipeline_size = p.pipeline_size;
      cfg.stages_per_device = 1;
      cfg.micro_batches = p.micro_batches;
      cfg.segments = 4;
      cfg.seq_len = p.seq_len;
      cfg.layers = p.layers;
      cfg.hidden_dim = p.hidden_dim;
      cfg.param_count = p.param_count;
      cfg.validate();
      return cfg;
    }
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : kPresets) names.emplace_back(p.name);
  return names;
}

bool is_preset_name(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (name == p.name) return true;
  }
  return false;
}

std::string scenario_to_text(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "pipeline_size = " << cfg.pipeline_size << '\n'
      << "stages_per_device = " << cfg.stages_per_device << '\n'
      << "micro_batches = " << cfg.micro_batches << '\n'
      << "segments = " << cfg.segments << '\n'
      << "seq_len = " << cfg.seq_len << '\n'
      << "layers = " << cfg.layers << '\n'
      << "hidden_dim = " << cfg.hidden_dim << '\n'
      << "param_count = " << cfg.param_count << '\n'
      << "backward_ratio = " << cfg.backward_ratio.str() << '\n'
      << "bw_split_ratio = " << cfg.bw_input_ratio.str() << ',' << cfg.bw_weight_ratio.str() << '\n'
      << "comm_latency = " << cfg.comm_latency.str() << '\n'
      << "activation_cost_per_token = " << cfg.activation_cost_per_token.str() << '\n'
      << "time_per_flop = " << cfg.time_per_flop.str() << '\n'
      << "cost_model = " << cost_model_name(cfg.cost_model) << '\n'
      << "uniform_forward = " << cfg.uniform_forward.str() << '\n';
  return out.str();
}

}  // namespace seqpipe
