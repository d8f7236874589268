// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: generate, simulate, validate, sweep and render
// pipeline-parallel schedules.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqpipe/cost.hpp"
#include "seqpipe/json_io.hpp"
#include "seqpipe/partition.hpp"
#include "seqpipe/render.hpp"
#include "seqpipe/schedule.hpp"
#include "seqpipe/sim.hpp"
#include "seqpipe/validate.hpp"

namespace {

using namespace seqpipe;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

struct ValidationFailure : std::runtime_error {
  explicit ValidationFailure(std::string text) : std::runtime_error(std::move(text)) {}
};

struct ConfigArgs {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs* args) {
  auto* config = cmd->add_option("--config", args->config_path, "scenario config file (key = value lines)");
  auto* preset = cmd->add_option("--preset", args->preset, "bundled scenario preset")
                     ->check(CLI::IsMember(preset_names()));
  config->excludes(preset);
  cmd->add_option("--set", args->overrides, "override a config key, e.g. --set segments=4")
      ->take_all();
}

ScenarioConfig resolve_config(const ConfigArgs& args) {
  ScenarioConfig cfg;
  if (!args.preset.empty()) {
    cfg = preset_scenario(args.preset);
  } else if (!args.config_path.empty()) {
    cfg = is_preset_name(args.config_path) ? preset_scenario(args.config_path)
                                           : load_scenario_file(args.config_path);
  }
  for (const std::string& kv : args.overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    }
    apply_scenario_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string utc_stamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string csv_safe(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, ',')) {
    if (!current.empty()) items.push_back(current);
  }
  return items;
}

struct SimulateArgs {
  ConfigArgs config;
  std::string kind;
  std::string partition_mode = "even";
  std::string out_path;
  std::string schedule_out;
  std::string gantt_mode;
  std::string gantt_out;
  int gantt_width = 120;
  std::size_t memory_downsample = 0;
  bool validate_first = false;
  bool stamp = false;
};

int run_simulate(const SimulateArgs& args) {
  ScenarioConfig cfg = resolve_config(args.config);
  PartitionMode mode = parse_partition_mode(args.partition_mode);
  SequencePartition partition = partition_for(cfg, mode);
  ScheduleKind kind = parse_schedule_kind(args.kind);
  Schedule schedule = generate(cfg, kind, partition);

  if (args.validate_first) {
    std::vector<Violation> violations = check_schedule(schedule);
    if (!violations.empty()) {
      throw ValidationFailure(violations_to_string(violations));
    }
  }
  if (!args.schedule_out.empty()) {
    write_text(args.schedule_out, schedule_to_json(schedule));
  }

  SimReport report = simulate(schedule, partition);
  std::string json = report_to_json(report, 2, args.memory_downsample);
  if (args.stamp) {
    // Splice a generated_at field after the schema line; keeps default
    // output byte-deterministic when the flag is off.
    auto pos = json.find('\n');
    json.insert(pos + 1, "  \"generated_at\": \"" + utc_stamp() + "\",\n");
  }
  write_text(args.out_path, json);

  if (!args.gantt_mode.empty()) {
    std::string art = args.gantt_mode == "svg" ? render_svg_gantt(report)
                                               : render_ascii_gantt(report, args.gantt_width);
    write_text(args.gantt_out, art);
  }
  return kExitOk;
}

struct SweepArgs {
  ConfigArgs config;
  std::string kinds = "gpipe,1f1b,1f1b-i,seq1f1b,seq1f1b-i,zb1p,seqzb1p";
  std::string pipeline_sizes;
  std::string micro_batches;
  std::string segment_counts;
  std::string stages_per_device;
  std::string seq_lens;
  std::string partition_mode = "even";
  std::string out_path;
  bool stamp = false;
};

int run_sweep(const SweepArgs& args) {
  ScenarioConfig base = resolve_config(args.config);
  PartitionMode mode = parse_partition_mode(args.partition_mode);

  auto ints_or_default = [](const std::string& list, std::int64_t fallback) {
    std::vector<std::int64_t> values;
    for (const std::string& item : split_list(list)) values.push_back(std::stoll(item));
    if (values.empty()) values.push_back(fallback);
    return values;
  };
  std::vector<std::string> kinds = split_list(args.kinds);
  auto pipelines = ints_or_default(args.pipeline_sizes, base.pipeline_size);
  auto stage_counts = ints_or_default(args.stages_per_device, base.stages_per_device);
  auto batch_counts = ints_or_default(args.micro_batches, base.micro_batches);
  auto segment_counts = ints_or_default(args.segment_counts, base.segments);
  auto seq_lens = ints_or_default(args.seq_lens, base.seq_len);

  std::ostringstream csv;
  if (args.stamp) csv << "# generated_at " << utc_stamp() << '\n';
  csv << "kind,pipeline_size,stages_per_device,micro_batches,segments,seq_len,partition,status,"
         "makespan,bubble_ratio,peak_memory,throughput\n";

  for (const std::string& kind_name : kinds) {
    ScheduleKind kind = parse_schedule_kind(kind_name);
    for (std::int64_t pipeline : pipelines) {
      for (std::int64_t stages : stage_counts) {
        for (std::int64_t batches : batch_counts) {
          for (std::int64_t segments : segment_counts) {
            for (std::int64_t seq_len : seq_lens) {
              ScenarioConfig cfg = base;
              cfg.pipeline_size = static_cast<int>(pipeline);
              cfg.stages_per_device = static_cast<int>(stages);
              cfg.micro_batches = static_cast<int>(batches);
              cfg.segments = static_cast<int>(segments);
              cfg.seq_len = seq_len;
              csv << schedule_kind_name(kind) << ',' << pipeline << ',' << stages << ','
                  << batches << ',' << segments << ',' << seq_len << ','
                  << partition_mode_name(mode) << ',';
              try {
                cfg.validate();
                SequencePartition partition = partition_for(cfg, mode);
                Schedule schedule = generate(cfg, kind, partition);
                SimReport report = simulate(schedule, partition);
                csv << "ok," << format_decimal(report.makespan, 6) << ','
                    << format_decimal(report.aggregate_bubble_ratio, 6) << ','
                    << format_decimal(report.max_peak_memory, 6) << ','
                    << format_decimal(report.modeled_throughput, 6) << '\n';
              } catch (const UnsupportedScheduleError& e) {
                csv << "skip:" << csv_safe(e.what()) << ",,,,\n";
              } catch (const std::invalid_argument& e) {
                csv << "skip:" << csv_safe(e.what()) << ",,,,\n";
              } catch (const std::domain_error& e) {
                csv << "skip:" << csv_safe(e.what()) << ",,,,\n";
              }
            }
          }
        }
      }
    }
  }
  write_text(args.out_path, csv.str());
  return kExitOk;
}

struct PartitionArgs {
  ConfigArgs config;
  std::string mode = "cwp";
  int segments = 0;
  bool as_json = false;
};

int run_partition(const PartitionArgs& args) {
  ScenarioConfig cfg = resolve_config(args.config);
  if (args.segments > 0) cfg.segments = args.segments;
  cfg.validate();
  SequencePartition partition = partition_for(cfg, parse_partition_mode(args.mode));
  BalanceReport balance = balance_report(partition, cfg);

  if (args.as_json) {
    std::ostringstream os;
    os << "{\n  \"lengths\": [";
    for (std::size_t i = 0; i < partition.lengths.size(); ++i) {
      os << (i ? ", " : "") << partition.lengths[i];
    }
    os << "],\n  \"imbalance\": \"" << partition.imbalance.str() << "\",\n  \"segment_costs\": [";
    for (std::size_t i = 0; i < balance.segment_costs.size(); ++i) {
      os << (i ? ", " : "") << '"' << balance.segment_costs[i].str() << '"';
    }
    os << "]\n}\n";
    std::cout << os.str();
    return kExitOk;
  }

  std::cout << "segment  tokens  forward_cost\n";
  for (std::size_t i = 0; i < partition.lengths.size(); ++i) {
    std::cout << i + 1 << "  " << partition.lengths[i] << "  "
              << balance.segment_costs[i].str() << '\n';
  }
  std::cout << "imbalance = " << partition.imbalance.str() << " ("
            << format_decimal(partition.imbalance, 6) << ")\n";
  return kExitOk;
}

struct ValidateArgs {
  std::string schedule_path;
};

int run_validate(const ValidateArgs& args) {
  std::ifstream in(args.schedule_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + args.schedule_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Schedule schedule = schedule_from_json(buf.str());
  std::vector<Violation> violations = check_schedule(schedule);
  if (violations.empty()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  throw ValidationFailure(violations_to_string(violations));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic generator/simulator/validator for pipeline-parallel schedules"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "generate a schedule and simulate it");
  add_config_options(sim_cmd, &sim_args.config);
  sim_cmd->add_option("--kind", sim_args.kind, "schedule kind")
      ->required()
      ->check(CLI::IsMember({"gpipe", "1f1b", "1f1b-i", "seq1f1b", "seq1f1b-i", "zb1p", "seqzb1p"},
                            CLI::ignore_case));
  sim_cmd->add_option("--partition", sim_args.partition_mode, "sequence partitioner")
      ->check(CLI::IsMember({"even", "cwp"}));
  sim_cmd->add_option("--out", sim_args.out_path, "report JSON path ('-' = stdout)");
  sim_cmd->add_option("--emit-schedule", sim_args.schedule_out, "also write the schedule JSON");
  sim_cmd->add_option("--gantt", sim_args.gantt_mode, "render a timeline")
      ->check(CLI::IsMember({"ascii", "svg"}));
  sim_cmd->add_option("--gantt-out", sim_args.gantt_out, "timeline path ('-' = stdout)");
  sim_cmd->add_option("--gantt-width", sim_args.gantt_width, "ascii timeline width in columns");
  sim_cmd->add_option("--memory-downsample", sim_args.memory_downsample,
                      "cap memory series points per device");
  sim_cmd->add_flag("--validate", sim_args.validate_first, "check the schedule before simulating");
  sim_cmd->add_flag("--stamp", sim_args.stamp, "include a generation timestamp");

  SweepArgs sweep_args;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a grid of scenarios to CSV");
  add_config_options(sweep_cmd, &sweep_args.config);
  sweep_cmd->add_option("--kinds", sweep_args.kinds, "comma-separated schedule kinds");
  sweep_cmd->add_option("--pipeline-sizes", sweep_args.pipeline_sizes, "comma-separated P values");
  sweep_cmd->add_option("--micro-batches", sweep_args.micro_batches, "comma-separated M values");
  sweep_cmd->add_option("--segment-counts", sweep_args.segment_counts, "comma-separated k values");
  sweep_cmd->add_option("--stages-per-device", sweep_args.stages_per_device,
                        "comma-separated stages-per-device values");
  sweep_cmd->add_option("--seq-lens", sweep_args.seq_lens, "comma-separated sequence lengths");
  sweep_cmd->add_option("--partition", sweep_args.partition_mode, "sequence partitioner")
      ->check(CLI::IsMember({"even", "cwp"}));
  sweep_cmd->add_option("--out", sweep_args.out_path, "CSV path ('-' = stdout)");
  sweep_cmd->add_flag("--stamp", sweep_args.stamp, "include a generation timestamp");

  PartitionArgs part_args;
  CLI::App* part_cmd = app.add_subcommand("partition", "compute a sequence partition");
  add_config_options(part_cmd, &part_args.config);
  part_cmd->add_option("--segments,-k", part_args.segments, "segment count override");
  part_cmd->add_option("--mode", part_args.mode, "partitioner")
      ->check(CLI::IsMember({"even", "cwp", "oracle"}));
  part_cmd->add_flag("--json", part_args.as_json, "emit JSON instead of a table");

  ValidateArgs val_args;
  CLI::App* val_cmd = app.add_subcommand("validate", "check a schedule JSON file");
  val_cmd->add_option("schedule", val_args.schedule_path, "schedule JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return run_simulate(sim_args);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    if (part_cmd->parsed()) return run_partition(part_args);
    if (val_cmd->parsed()) return run_validate(val_args);
  } catch (const ValidationFailure& e) {
    std::cerr << e.what();
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
