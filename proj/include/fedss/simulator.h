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

#ifndef FEDSS_SIMULATOR_H_
#define FEDSS_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fedss/policies.h"
#include "json.hpp"

namespace fedss {

struct RoundRecord {
  std::size_t round_index = 0;
  PolicyKind policy = PolicyKind::kRandom;
  double duration = 0.0;
  std::vector<ClientId> invited;
  std::vector<ClientId> aggregated;
  std::optional<std::size_t> cluster_index;
};

// Nearest-rank quantiles of the per-round durations.
struct DurationQuantiles {
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

struct SimulationReport {
  PolicyKind policy = PolicyKind::kRandom;
  std::size_t clients_per_round = 0;
  std::vector<RoundRecord> records;
  double total_time = 0.0;
  std::map<std::uint32_t, std::size_t> selection_counts;    // times invited
  std::map<std::uint32_t, std::size_t> aggregation_counts;  // times aggregated
  DurationQuantiles quantiles;
  std::optional<std::size_t> k_anonymity;  // FedSS only
};

// Smallest value v in `values` with at least q of the sample <= v.
double NearestRankQuantile(std::vector<double> values, double q);

// Accumulates rounds into a report. Used by both the pure time-model
// simulation and the trainer so they account time identically.
class ReportBuilder {
 public:
  ReportBuilder(const Population& population, const PolicyConfig& config);

  void Add(const RoundSelection& selection);
  SimulationReport Finish() &&;

 private:
  SimulationReport report_;
};

SimulationReport Simulate(const Population& population,
                          const PolicyConfig& config, std::size_t rounds);

// Recomputes a round's duration from the population.
double ReplayDuration(const Population& population, const RoundRecord& record);

// (duration, cumulative fraction) steps of the empirical CDF, ascending.
std::vector<std::pair<double, double>> RoundDurationCdf(
    const SimulationReport& report);

struct FairnessSummary {
  // count / rounds, so the fair value is K/N for every client
  std::map<std::uint32_t, double> selection_rate;
  std::map<std::uint32_t, double> aggregation_rate;
  double gini = 0.0;  // of aggregation counts
  std::vector<ClientId> slow_quartile;
  double slow_quartile_share = 0.0;  // of all aggregations
};

FairnessSummary Fairness(const SimulationReport& report,
                         const Population& population);

// Fraction of all aggregations that went to the `count` slowest clients.
double SlowestAggregationShare(const SimulationReport& report,
                               const Population& population, std::size_t count);

nlohmann::json ReportToJson(const SimulationReport& report);

}  // namespace fedss

#endif  // FEDSS_SIMULATOR_H_
