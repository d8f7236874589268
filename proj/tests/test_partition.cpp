// Copyright (c) 2026 The seqpipe Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <tuple>
#include <vector>

#include "seqpipe/cost.hpp"
#include "seqpipe/partition.hpp"

using namespace seqpipe;

namespace {

ScenarioConfig attn_config(std::int64_t n, int k, int layers = 1, std::int64_t hidden = 1,
                           std::int64_t params = 0) {
  ScenarioConfig cfg;
  cfg.seq_len = n;
  cfg.segments = k;
  cfg.layers = layers;
  cfg.hidden_dim = hidden;
  cfg.param_count = params;
  cfg.validate();
  return cfg;
}

}  // namespace

TEST_CASE("even partition splits with remainder to the front") {
  ScenarioConfig cfg = attn_config(100, 4);
  CHECK(even_partition(100, 4, cfg).lengths == std::vector<std::int64_t>{25, 25, 25, 25});
  CHECK(even_partition(10, 3, cfg).lengths == std::vector<std::int64_t>{4, 3, 3});
  CHECK(even_partition(5, 1, cfg).lengths == std::vector<std::int64_t>{5});
  CHECK_THROWS_AS(even_partition(3, 4, cfg), std::invalid_argument);
}

TEST_CASE("computation-wise partition reproduces the quadratic root example") {
  // With only the attention term, the first of two segments solves
  // n1^2 = (n - n1) * n; for n = 100 the continuous root is ~61.8.
  ScenarioConfig cfg = attn_config(100, 2);
  SequencePartition p = cwp_partition(cfg);
  CHECK(p.lengths == std::vector<std::int64_t>{62, 38});
  CHECK(p.total == 100);
}

TEST_CASE("cwp is deterministic") {
  ScenarioConfig cfg = attn_config(511, 4, 3, 7, 1000);
  SequencePartition a = cwp_partition(cfg);
  SequencePartition b = cwp_partition(cfg);
  CHECK(a.lengths == b.lengths);
  CHECK(a.imbalance == b.imbalance);
}

TEST_CASE("linear cost collapses cwp to the even split") {
  // With the attention term disabled the per-segment cost is linear in the
  // length, so equal cost forces equal lengths.
  ScenarioConfig cfg = attn_config(100, 4, 0, 0, 1000);
  CHECK(cwp_partition(cfg).lengths == even_partition(cfg).lengths);
  ScenarioConfig odd = attn_config(103, 4, 0, 0, 7);
  CHECK(cwp_partition(odd).lengths == even_partition(odd).lengths);
}

TEST_CASE("single segment partition is the identity") {
  ScenarioConfig cfg = attn_config(77, 1);
  CHECK(cwp_partition(cfg).lengths == std::vector<std::int64_t>{77});
  CHECK(cwp_partition(cfg).imbalance == Rational(0));
}

TEST_CASE("degenerate cost model is rejected") {
  ScenarioConfig cfg = attn_config(100, 2, 0, 0, 0);
  CHECK_THROWS_AS(cwp_partition(cfg), std::domain_error);
  CHECK_THROWS_AS(oracle_partition(cfg), std::domain_error);
}

TEST_CASE("oracle guard rejects big instances") {
  CHECK_THROWS_AS(oracle_partition(attn_config(513, 2)), std::invalid_argument);
  ScenarioConfig five = attn_config(64, 4);
  five.segments = 5;
  five.validate();
  CHECK_THROWS_AS(oracle_partition(five), std::invalid_argument);
}

TEST_CASE("oracle finds the minimal imbalance composition") {
  ScenarioConfig cfg = attn_config(20, 2);
  SequencePartition best = oracle_partition(cfg);
  // Exhaustive reference: try every first-segment length.
  for (std::int64_t n1 = 1; n1 < 20; ++n1) {
    SequencePartition candidate = make_partition({n1, 20 - n1}, cfg);
    CHECK(best.imbalance <= candidate.imbalance);
  }
  CHECK(best.lengths[0] >= best.lengths[1]);  // later segment attends over a longer prefix

  CHECK(oracle_partition(attn_config(33, 1)).imbalance == Rational(0));
  CHECK(oracle_partition(attn_config(4, 4)).lengths == std::vector<std::int64_t>{1, 1, 1, 1});
}

TEST_CASE("balance report lists per-segment costs and imbalance") {
  ScenarioConfig cfg = attn_config(100, 2);
  BalanceReport cwp = balance_report(make_partition({62, 38}, cfg), cfg);
  CHECK(cwp.segment_costs == std::vector<Rational>{Rational(7688), Rational(7600)});
  CHECK(cwp.imbalance == Rational(88 * 2, 7688 + 7600));  // ~0.0115

  BalanceReport even = balance_report(make_partition({50, 50}, cfg), cfg);
  CHECK(even.segment_costs == std::vector<Rational>{Rational(5000), Rational(10000)});
  CHECK(even.imbalance == Rational(2, 3));

  ScenarioConfig one = attn_config(100, 1);
  CHECK(balance_report(make_partition({100}, one), one).imbalance == Rational(0));
}

TEST_CASE("partition imbalance matches the balance report") {
  ScenarioConfig cfg = attn_config(100, 3, 2, 5, 11);
  SequencePartition p = cwp_partition(cfg);
  CHECK(p.imbalance == balance_report(p, cfg).imbalance);
}

TEST_CASE("cwp never loses to the even split") {
  for (std::int64_t n : {8, 16, 33, 64, 100, 127, 256}) {
    for (int k : {2, 3, 4}) {
      if (n < 4 * k) continue;
      for (auto [layers, hidden, params] :
           std::vector<std::tuple<int, std::int64_t, std::int64_t>>{
               {1, 1, 0}, {2, 4, 100}, {1, 8, 10000}}) {
        ScenarioConfig cfg = attn_config(n, k, layers, hidden, params);
        CHECK(cwp_partition(cfg).imbalance <= even_partition(cfg).imbalance);
      }
    }
  }
}

TEST_CASE("cwp lengths are non-increasing without a parameter term") {
  for (std::int64_t n : {16, 100, 257}) {
    for (int k : {2, 3, 4}) {
      SequencePartition p = cwp_partition(attn_config(n, k));
      for (std::size_t i = 1; i < p.lengths.size(); ++i) {
        CHECK(p.lengths[i - 1] >= p.lengths[i]);
      }
    }
  }
}

TEST_CASE("cwp stays within one-token rounding slack of the oracle") {
  for (std::int64_t n : {12, 40, 100}) {
    for (int k : {2, 3, 4}) {
      ScenarioConfig cfg = attn_config(n, k, 1, 2, 50);
      SequencePartition cwp = cwp_partition(cfg);
      SequencePartition best = oracle_partition(cfg);
      // Slack: twice the largest single-token cost step, relative to the
      // mean segment cost of the cwp solution.
      Rational max_step{0};
      Rational sum{0};
      std::int64_t prefix = 0;
      for (std::size_t i = 0; i < cwp.lengths.size(); ++i) {
        std::int64_t len = cwp.lengths[i];
        Rational step = Rational::from_parts(
            segment_flops(cfg, prefix, len + 1) - segment_flops(cfg, prefix, len), 1);
        max_step = std::max(max_step, step);
        sum += Rational::from_parts(segment_flops(cfg, prefix, len), 1);
        prefix += len;
      }
      Rational slack = Rational(2) * max_step * Rational(k) / sum;
      CHECK(cwp.imbalance <= best.imbalance + slack);
    }
  }
}
