// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "seqpipe/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "seqpipe/cost.hpp"

namespace seqpipe {

const char* partition_mode_name(PartitionMode mode) {
  switch (mode) {
    case PartitionMode::kEven: return "even";
    case PartitionMode::kCwp: return "cwp";
    case PartitionMode::kOracle: return "oracle";
  }
  return "?";
}

PartitionMode parse_partition_mode(std::string_view name) {
  if (name == "even") return PartitionMode::kEven;
  if (name == "cwp") return PartitionMode::kCwp;
  if (name == "oracle") return PartitionMode::kOracle;
  throw std::invalid_argument("unknown partition mode '" + std::string(name) + "'");
}

namespace {

bool degenerate_cost_model(const ScenarioConfig& cfg) {
  return std::int64_t(cfg.layers) * cfg.hidden_dim == 0 && cfg.param_count == 0;
}

/// Exact (max - min) * k / sum over integer segment FLOPs.
Rational imbalance_of(const std::vector<std::int64_t>& lengths, const ScenarioConfig& cfg) {
  detail::Int128 sum = 0;
  detail::Int128 max_cost = 0;
  detail::Int128 min_cost = 0;
  std::int64_t prefix = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    detail::Int128 cost = segment_flops(cfg, prefix, lengths[i]);
    prefix += lengths[i];
    sum += cost;
    if (i == 0) {
      max_cost = min_cost = cost;
    } else {
      max_cost = std::max(max_cost, cost);
      min_cost = std::min(min_cost, cost);
    }
  }
  if (sum == 0) return Rational(0);
  return Rational::from_parts((max_cost - min_cost) * detail::Int128(lengths.size()), sum);
}

}  // namespace

SequencePartition make_partition(std::vector<std::int64_t> lengths, const ScenarioConfig& cfg) {
  if (lengths.empty()) throw std::invalid_argument("partition must have at least one segment");
  std::int64_t total = 0;
  for (std::int64_t len : lengths) {
    if (len < 1) throw std::invalid_argument("every partition segment must hold at least one token");
    total += len;
  }
  if (total != cfg.seq_len) {
    throw std::invalid_argument("partition lengths sum to " + std::to_string(total) +
                                " but seq_len is " + std::to_string(cfg.seq_len));
  }
  SequencePartition p;
  p.imbalance = imbalance_of(lengths, cfg);
  p.lengths = std::move(lengths);
  p.total = total;
  return p;
}

SequencePartition even_partition(std::int64_t n, int k, const ScenarioConfig& cfg) {
  if (k < 1) throw std::invalid_argument("segment count must be >= 1");
  if (n < k) throw std::invalid_argument("cannot split " + std::to_string(n) + " tokens into " +
                                         std::to_string(k) + " non-empty segments");
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(k), n / k);
  std::int64_t rem = n % k;
  for (std::int64_t i = 0; i < rem; ++i) lengths[static_cast<std::size_t>(i)] += 1;
  ScenarioConfig local = cfg;
  local.seq_len = n;
  local.segments = k;
  return make_partition(std::move(lengths), local);
}

SequencePartition even_partition(const ScenarioConfig& cfg) {
  return even_partition(cfg.seq_len, cfg.segments, cfg);
}

namespace {

/// Continuous segment lengths hitting per-segment cost `target`, taken in
/// order: each segment solves a*x^2 + b*x = target where b grows with the
/// accumulated prefix.
std::vector<double> continuous_lengths_for_target(const ScenarioConfig& cfg, double target) {
  const double a = 2.0 * static_cast<double>(cfg.layers) * static_cast<double>(cfg.hidden_dim);
  const int k = cfg.segments;
  std::vector<double> lengths(static_cast<std::size_t>(k), 0.0);
  double prefix = 0.0;
  for (int i = 0; i < k; ++i) {
    double b = 2.0 * static_cast<double>(cfg.param_count) + a * prefix;
    double x = 0.0;
    if (a == 0.0) {
      x = target / b;
    } else {
      x = (-b + std::sqrt(b * b + 4.0 * a * target)) / (2.0 * a);
    }
    lengths[static_cast<std::size_t>(i)] = x;
    prefix += x;
  }
  return lengths;
}

/// Largest-remainder rounding that preserves the integer sum.
std::vector<std::int64_t> round_preserving_sum(const std::vector<double>& values, std::int64_t sum) {
  const std::size_t k = values.size();
  std::vector<std::int64_t> result(k, 0);
  std::vector<std::pair<double, std::size_t>> remainders(k);
  std::int64_t floored_sum = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double clamped = std::max(0.0, values[i]);
    std::int64_t f = static_cast<std::int64_t>(std::floor(clamped));
    result[i] = f;
    remainders[i] = {clamped - static_cast<double>(f), i};
    floored_sum += f;
  }
  std::int64_t leftover = sum - floored_sum;
  // Largest remainder first; ties go to the earliest segment.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });
  std::size_t idx = 0;
  while (leftover > 0) {
    result[remainders[idx % k].second] += 1;
    ++idx;
    --leftover;
  }
  while (leftover < 0) {
    // Over-allocation can only happen through floating error; trim from the
    // smallest remainders upward.
    std::size_t victim = remainders[k - 1 - (idx % k)].second;
    if (result[victim] > 0) {
      result[victim] -= 1;
      ++leftover;
    }
    ++idx;
  }
  return result;
}

}  // namespace

SequencePartition cwp_partition(const ScenarioConfig& cfg) {
  if (cfg.seq_len < cfg.segments) {
    throw std::invalid_argument("seq_len must be >= segments");
  }
  if (degenerate_cost_model(cfg)) {
    throw std::domain_error("cannot balance segments under an all-zero cost model");
  }
  const int k = cfg.segments;
  const std::int64_t n = cfg.seq_len;
  if (k == 1) return make_partition({n}, cfg);

  // Bisection on the common per-segment cost target. The continuous total
  // length is monotone in the target, so bracket with the whole-sequence
  // cost and shrink until the total is within 1e-6 * n (far below one-token
  // granularity) or the iteration cap.
  const double nd = static_cast<double>(n);
  double lo = 0.0;
  double hi = 2.0 * nd * static_cast<double>(cfg.param_count) +
              2.0 * static_cast<double>(cfg.layers) * nd * nd * static_cast<double>(cfg.hidden_dim);
  std::vector<double> continuous;
  double mid = hi;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    continuous = continuous_lengths_for_target(cfg, mid);
    double total = std::accumulate(continuous.begin(), continuous.end(), 0.0);
    if (std::abs(total - nd) <= 1e-6 * nd) break;
    if (total < nd) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  continuous = continuous_lengths_for_target(cfg, mid);

  std::vector<std::int64_t> lengths = round_preserving_sum(continuous, n);

  // Rounding can produce empty segments for extreme shapes; repair by
  // stealing a token from the current longest segment.
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    while (lengths[i] < 1) {
      std::size_t longest = 0;
      for (std::size_t j = 1; j < lengths.size(); ++j) {
        if (lengths[j] > lengths[longest]) longest = j;
      }
      if (lengths[longest] <= 1) throw std::logic_error("cannot repair degenerate partition");
      lengths[longest] -= 1;
      lengths[i] += 1;
    }
  }
  return make_partition(std::move(lengths), cfg);
}

namespace {

struct OracleBest {
  bool set = false;
  std::vector<std::int64_t> lengths;
  detail::Int128 spread = 0;  // max - min
  detail::Int128 sum = 0;
};

/// spread/sum comparison by cross-multiplication; mean = sum/k with equal k.
bool better(const detail::Int128& spread_a, const detail::Int128& sum_a, const OracleBest& b) {
  if (!b.set) return true;
  return spread_a * b.sum < b.spread * sum_a;
}

void enumerate_compositions(const ScenarioConfig& cfg, int depth, std::int64_t remaining,
                            std::vector<std::int64_t>& current, std::vector<detail::Int128>& costs,
                            std::int64_t prefix, OracleBest& best) {
  const int k = cfg.segments;
  if (depth == k - 1) {
    current[static_cast<std::size_t>(depth)] = remaining;
    costs[static_cast<std::size_t>(depth)] = segment_flops(cfg, prefix, remaining);
    detail::Int128 max_cost = costs[0];
    detail::Int128 min_cost = costs[0];
    detail::Int128 sum = 0;
    for (int i = 0; i < k; ++i) {
      max_cost = std::max(max_cost, costs[static_cast<std::size_t>(i)]);
      min_cost = std::min(min_cost, costs[static_cast<std::size_t>(i)]);
      sum += costs[static_cast<std::size_t>(i)];
    }
    detail::Int128 spread = max_cost - min_cost;
    if (sum != 0 && better(spread, sum, best)) {
      best.set = true;
      best.lengths = current;
      best.spread = spread;
      best.sum = sum;
    }
    return;
  }
  std::int64_t max_here = remaining - (k - 1 - depth);  // leave >=1 token per later segment
  for (std::int64_t len = 1; len <= max_here; ++len) {
    current[static_cast<std::size_t>(depth)] = len;
    costs[static_cast<std::size_t>(depth)] = segment_flops(cfg, prefix, len);
    enumerate_compositions(cfg, depth + 1, remaining - len, current, costs, prefix + len, best);
  }
}

}  // namespace

SequencePartition oracle_partition(const ScenarioConfig& cfg) {
  if (cfg.seq_len > 512 || cfg.segments > 4) {
    throw std::invalid_argument("oracle_partition is guarded to seq_len <= 512 and segments <= 4");
  }
  if (cfg.seq_len < cfg.segments) throw std::invalid_argument("seq_len must be >= segments");
  if (degenerate_cost_model(cfg)) {
    throw std::domain_error("cannot balance segments under an all-zero cost model");
  }
  OracleBest best;
  std::vector<std::int64_t> current(static_cast<std::size_t>(cfg.segments), 0);
  std::vector<detail::Int128> costs(static_cast<std::size_t>(cfg.segments), 0);
  enumerate_compositions(cfg, 0, cfg.seq_len, current, costs, 0, best);
  if (!best.set) throw std::logic_error("oracle found no composition");
  return make_partition(std::move(best.lengths), cfg);
}

SequencePartition partition_for(const ScenarioConfig& cfg, PartitionMode mode) {
  switch (mode) {
    case PartitionMode::kEven: return even_partition(cfg);
    case PartitionMode::kCwp: return cwp_partition(cfg);
    case PartitionMode::kOracle: return oracle_partition(cfg);
  }
  throw std::logic_error("unreachable partition mode");
}

BalanceReport balance_report(const SequencePartition& partition, const ScenarioConfig& cfg) {
  BalanceReport report;
  report.segment_costs.reserve(partition.lengths.size());
  for (int i = 1; i <= partition.segment_count(); ++i) {
    report.segment_costs.push_back(forward_cost(cfg, partition, i));
  }
  Rational max_cost = report.segment_costs.front();
  Rational min_cost = report.segment_costs.front();
  Rational sum{0};
  for (const Rational& c : report.segment_costs) {
    max_cost = std::max(max_cost, c);
    min_cost = std::min(min_cost, c);
    sum += c;
  }
  if (sum.is_zero()) {
    report.imbalance = Rational(0);
  } else {
    report.imbalance = (max_cost - min_cost) * Rational(partition.segment_count()) / sum;
  }
  return report;
}

}  // namespace seqpipe
