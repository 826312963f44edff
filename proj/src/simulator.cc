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

#include "fedss/simulator.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedss/errors.h"

namespace fedss {

double NearestRankQuantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

ReportBuilder::ReportBuilder(const Population& population,
                             const PolicyConfig& config) {
  report_.policy = config.kind;
  report_.clients_per_round = config.clients_per_round;
  for (ClientId id : population.ids()) {
    report_.selection_counts[id.value] = 0;
    report_.aggregation_counts[id.value] = 0;
  }
  if (config.kind == PolicyKind::kFedSS && config.clusters) {
    report_.k_anonymity = KAnonymity(*config.clusters);
  }
}

void ReportBuilder::Add(const RoundSelection& s) {
  RoundRecord r;
  r.round_index = s.round_index;
  r.policy = report_.policy;
  r.duration = s.duration;
  r.invited = s.invited;
  r.aggregated = s.aggregated;
  r.cluster_index = s.cluster_index;
  report_.total_time += r.duration;
  for (ClientId id : r.invited) ++report_.selection_counts[id.value];
  for (ClientId id : r.aggregated) ++report_.aggregation_counts[id.value];
  report_.records.push_back(std::move(r));
}

SimulationReport ReportBuilder::Finish() && {
  std::vector<double> durations;
  durations.reserve(report_.records.size());
  for (const auto& r : report_.records) durations.push_back(r.duration);
  report_.quantiles = {NearestRankQuantile(durations, 0.10),
                       NearestRankQuantile(durations, 0.50),
                       NearestRankQuantile(durations, 0.90),
                       NearestRankQuantile(durations, 0.99)};
  return std::move(report_);
}

SimulationReport Simulate(const Population& population,
                          const PolicyConfig& config, std::size_t rounds) {
  SelectionPolicy policy(population, config);
  ReportBuilder builder(population, config);
  for (std::size_t r = 0; r < rounds; ++r) builder.Add(policy.Next());
  return std::move(builder).Finish();
}

double ReplayDuration(const Population& population, const RoundRecord& record) {
  double slowest = 0.0;
  for (ClientId id : record.aggregated) {
    slowest = std::max(slowest, population.round_time(id));
  }
  return slowest;
}

std::vector<std::pair<double, double>> RoundDurationCdf(
    const SimulationReport& report) {
  std::vector<double> d;
  d.reserve(report.records.size());
  for (const auto& r : report.records) d.push_back(r.duration);
  std::sort(d.begin(), d.end());
  std::vector<std::pair<double, double>> cdf;
  const auto n = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i + 1 < d.size() && d[i + 1] == d[i]) continue;
    cdf.emplace_back(d[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

FairnessSummary Fairness(const SimulationReport& report,
                         const Population& population) {
  FairnessSummary f;
  const auto rounds = static_cast<double>(report.records.size());
  for (const auto& [id, count] : report.selection_counts) {
    f.selection_rate[id] = rounds > 0 ? static_cast<double>(count) / rounds : 0.0;
  }
  std::vector<double> counts;
  for (const auto& [id, count] : report.aggregation_counts) {
    f.aggregation_rate[id] =
        rounds > 0 ? static_cast<double>(count) / rounds : 0.0;
    counts.push_back(static_cast<double>(count));
  }

  // Gini = sum_i (2i - n - 1) x_(i) / (n * sum x), x sorted ascending.
  std::sort(counts.begin(), counts.end());
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total > 0.0) {
    const auto n = static_cast<double>(counts.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * counts[i];
    }
    f.gini = acc / (n * total);
  }

  const std::size_t quartile = std::max<std::size_t>(1, population.size() / 4);
  auto order = population.ids_by_round_time();
  f.slow_quartile.assign(order.end() - static_cast<std::ptrdiff_t>(quartile),
                         order.end());
  std::sort(f.slow_quartile.begin(), f.slow_quartile.end());
  f.slow_quartile_share = SlowestAggregationShare(report, population, quartile);
  return f;
}

double SlowestAggregationShare(const SimulationReport& report,
                               const Population& population,
                               std::size_t count) {
  count = std::min(count, population.size());
  const auto order = population.ids_by_round_time();
  std::size_t slow = 0;
  std::size_t total = 0;
  for (const auto& [id, c] : report.aggregation_counts) total += c;
  for (std::size_t i = order.size() - count; i < order.size(); ++i) {
    auto it = report.aggregation_counts.find(order[i].value);
    if (it != report.aggregation_counts.end()) slow += it->second;
  }
  return total > 0 ? static_cast<double>(slow) / static_cast<double>(total)
                   : 0.0;
}

nlohmann::json ReportToJson(const SimulationReport& report) {
  nlohmann::json doc;
  doc["policy"] = PolicyName(report.policy);
  doc["rounds"] = report.records.size();
  doc["clients_per_round"] = report.clients_per_round;
  doc["total_time_s"] = report.total_time;
  doc["round_duration_quantiles_s"] = {{"p10", report.quantiles.p10},
                                       {"p50", report.quantiles.p50},
                                       {"p90", report.quantiles.p90},
                                       {"p99", report.quantiles.p99}};
  doc["k_anonymity"] = report.k_anonymity
                           ? nlohmann::json(*report.k_anonymity)
                           : nlohmann::json(nullptr);
  auto counts = [](const std::map<std::uint32_t, std::size_t>& m) {
    auto arr = nlohmann::json::array();
    for (const auto& [id, c] : m) arr.push_back({{"id", id}, {"count", c}});
    return arr;
  };
  doc["selection_counts"] = counts(report.selection_counts);
  doc["aggregation_counts"] = counts(report.aggregation_counts);
  auto& rounds = doc["records"] = nlohmann::json::array();
  for (const auto& r : report.records) {
    auto ids = [](const std::vector<ClientId>& v) {
      auto arr = nlohmann::json::array();
      for (ClientId id : v) arr.push_back(id.value);
      return arr;
    };
    rounds.push_back({{"round", r.round_index},
                      {"duration_s", r.duration},
                      {"invited", ids(r.invited)},
                      {"aggregated", ids(r.aggregated)},
                      {"cluster", r.cluster_index
                                      ? nlohmann::json(*r.cluster_index)
                                      : nlohmann::json(nullptr)}});
  }
  return doc;
}

}  // namespace fedss
