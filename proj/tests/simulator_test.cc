// Copyright 2026 The fedss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fedss/clustering.h"
#include "fedss/simulator.h"
#include "test_support.h"

namespace fedss {
namespace {

PolicyConfig Config(PolicyKind kind, std::uint64_t seed, const Population& pop,
                    std::size_t k_clusters = 4) {
  PolicyConfig c;
  c.kind = kind;
  c.clients_per_round = 5;
  c.fedcs_overselect = 8;
  c.seed = seed;
  if (kind == PolicyKind::kFedSS) c.clusters = ClusterByRoundTime(pop, k_clusters);
  return c;
}

SimulationReport FromDurations(const Population& pop, const std::vector<double>& d) {
  ReportBuilder builder(pop, Config(PolicyKind::kRandom, 0, pop));
  for (std::size_t i = 0; i < d.size(); ++i) {
    RoundSelection s;
    s.round_index = i;
    s.duration = d[i];
    builder.Add(s);
  }
  return std::move(builder).Finish();
}

TEST_CASE("zero rounds give an empty report") {
  const Population pop = testing::DefaultFixture();
  for (auto kind : {PolicyKind::kRandom, PolicyKind::kFedCS, PolicyKind::kFedSS}) {
    const auto r = Simulate(pop, Config(kind, 1, pop), 0);
    CHECK(r.records.empty());
    CHECK(r.total_time == 0.0);
    CHECK(r.quantiles.p50 == 0.0);
    CHECK(RoundDurationCdf(r).empty());
    CHECK(r.selection_counts.size() == 20);
    CHECK(Fairness(r, pop).gini == 0.0);
  }
}

TEST_CASE("homogeneous population: total is rounds times the common time") {
  const Population pop = testing::PopulationWithTimes(std::vector<double>(20, 3.25));
  for (auto kind : {PolicyKind::kRandom, PolicyKind::kFedCS, PolicyKind::kFedSS}) {
    CHECK(Simulate(pop, Config(kind, 2, pop), 400).total_time == 400 * 3.25);
  }
}

TEST_CASE("report durations replay from the population") {
  const Population pop = testing::DefaultFixture();
  for (auto kind : {PolicyKind::kRandom, PolicyKind::kFedCS, PolicyKind::kFedSS}) {
    const auto r = Simulate(pop, Config(kind, 3, pop), 500);
    REQUIRE(r.records.size() == 500);
    double total = 0.0;
    std::size_t invited = 0, aggregated = 0;
    for (const auto& rec : r.records) {
      CHECK(rec.duration == ReplayDuration(pop, rec));
      CHECK(rec.aggregated.size() == 5);
      total += rec.duration;
    }
    for (const auto& [id, c] : r.selection_counts) invited += c;
    for (const auto& [id, c] : r.aggregation_counts) aggregated += c;
    CHECK(r.total_time == doctest::Approx(total).epsilon(1e-12));
    CHECK(aggregated == 500 * 5);
    CHECK(invited == 500 * (kind == PolicyKind::kFedCS ? 8 : 5));
    CHECK(r.k_anonymity.has_value() == (kind == PolicyKind::kFedSS));
  }
}

TEST_CASE("cdf of distinct durations") {
  const Population pop = testing::DefaultFixture();
  const auto cdf = RoundDurationCdf(FromDurations(pop, {3, 1, 4, 2}));
  REQUIRE(cdf.size() == 4);
  CHECK(cdf[0] == std::pair<double, double>{1, 0.25});
  CHECK(cdf[1] == std::pair<double, double>{2, 0.5});
  CHECK(cdf[2] == std::pair<double, double>{3, 0.75});
  CHECK(cdf[3] == std::pair<double, double>{4, 1.0});
}

TEST_CASE("cdf of equal durations is one step") {
  const Population pop = testing::DefaultFixture();
  const auto cdf = RoundDurationCdf(FromDurations(pop, {6, 6, 6}));
  REQUIRE(cdf.size() == 1);
  CHECK(cdf[0] == std::pair<double, double>{6, 1.0});
}

TEST_CASE("nearest-rank quantiles") {
  const std::vector<double> v{15, 20, 35, 40, 50};
  CHECK(NearestRankQuantile(v, 0.05) == 15);
  CHECK(NearestRankQuantile(v, 0.30) == 20);
  CHECK(NearestRankQuantile(v, 0.40) == 20);
  CHECK(NearestRankQuantile(v, 0.50) == 35);
  CHECK(NearestRankQuantile(v, 1.00) == 50);
  CHECK(NearestRankQuantile({}, 0.5) == 0.0);
  const Population pop = testing::DefaultFixture();
  const auto r = FromDurations(pop, {10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
  CHECK(r.quantiles.p10 == 1);
  CHECK(r.quantiles.p50 == 5);
  CHECK(r.quantiles.p90 == 9);
  CHECK(r.quantiles.p99 == 10);
}

// Mean absolute difference form of the Gini coefficient.
double OracleGini(const std::map<std::uint32_t, std::size_t>& counts) {
  double diff = 0.0, sum = 0.0;
  for (const auto& [a, x] : counts) {
    sum += static_cast<double>(x);
    for (const auto& [b, y] : counts) {
      diff += std::abs(static_cast<double>(x) - static_cast<double>(y));
    }
  }
  const double n = static_cast<double>(counts.size());
  return diff / (2.0 * n * sum);
}

TEST_CASE("gini matches the mean absolute difference form") {
  const Population pop = testing::DefaultFixture();
  for (auto kind : {PolicyKind::kRandom, PolicyKind::kFedCS, PolicyKind::kFedSS}) {
    const auto r = Simulate(pop, Config(kind, 5, pop), 800);
    CHECK(Fairness(r, pop).gini ==
          doctest::Approx(OracleGini(r.aggregation_counts)).epsilon(1e-12));
  }
}

TEST_CASE("fedss aggregates every client equally often") {
  const Population pop = testing::DefaultFixture();
  const std::size_t rounds = 4000;
  const auto r = Simulate(pop, Config(PolicyKind::kFedSS, 6, pop), rounds);
  const double fair = static_cast<double>(rounds) * 5 / 20;
  for (const auto& [id, c] : r.aggregation_counts) {
    CHECK(std::abs(static_cast<double>(c) - fair) <= 0.2 * fair);
  }
  const auto f = Fairness(r, pop);
  CHECK(f.slow_quartile.size() == 5);
  CHECK(f.slow_quartile_share == doctest::Approx(0.25).epsilon(0.05));
  CHECK(f.gini < 0.05);
}

TEST_CASE("fedcs starves the slow quartile") {
  const Population pop = testing::DefaultFixture();
  const auto r = Simulate(pop, Config(PolicyKind::kFedCS, 7, pop), 10000);
  const auto f = Fairness(r, pop);
  CHECK(f.slow_quartile_share < 0.05);
  CHECK(f.gini > 0.3);
}

TEST_CASE("random invitations are uniform") {
  const Population pop = testing::DefaultFixture();
  const std::size_t rounds = 10000;
  const auto r = Simulate(pop, Config(PolicyKind::kRandom, 8, pop), rounds);
  const auto f = Fairness(r, pop);
  for (const auto& [id, rate] : f.selection_rate) {
    CHECK(std::abs(rate - 0.25) <= 0.2 * 0.25);
  }
}

TEST_CASE("same seed gives identical report json") {
  const Population pop = testing::DefaultFixture();
  const auto a = ReportToJson(Simulate(pop, Config(PolicyKind::kFedSS, 9, pop, 2), 100));
  const auto b = ReportToJson(Simulate(pop, Config(PolicyKind::kFedSS, 9, pop, 2), 100));
  CHECK(a.dump() == b.dump());
  const auto c = ReportToJson(Simulate(pop, Config(PolicyKind::kFedSS, 10, pop, 2), 100));
  CHECK(a.dump() != c.dump());
}

}  // namespace
}  // namespace fedss
