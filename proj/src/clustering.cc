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

#include "fedss/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fedss/errors.h"
#include "fedss/kernels.h"

namespace fedss {
namespace {

void CheckK(std::size_t k, std::size_t n) {
  if (k == 0) throw ConfigError("number of clusters must be at least 1");
  if (k > n) {
    throw ConfigError("number of clusters " + std::to_string(k) +
                      " exceeds number of clients " + std::to_string(n));
  }
}

double MeanTime(const std::vector<TimedClient>& members, double fallback) {
  if (members.empty()) return fallback;
  double sum = 0.0;
  for (const auto& m : members) sum += m.time;
  return sum / static_cast<double>(members.size());
}

std::vector<double> Times(std::span<const TimedClient> clients) {
  std::vector<double> out(clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) out[i] = clients[i].time;
  return out;
}

std::vector<TimedClient> Sorted(std::span<const TimedClient> clients) {
  std::vector<TimedClient> out(clients.begin(), clients.end());
  std::sort(out.begin(), out.end(), FasterThan);
  return out;
}

}  // namespace

bool FasterThan(const TimedClient& a, const TimedClient& b) {
  if (a.time != b.time) return a.time < b.time;
  return a.id < b.id;
}

std::size_t ClusterSet::min_size() const {
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& c : clusters) m = std::min(m, c.members.size());
  return clusters.empty() ? 0 : m;
}

std::size_t ClusterSet::max_size() const {
  std::size_t m = 0;
  for (const auto& c : clusters) m = std::max(m, c.members.size());
  return m;
}

std::vector<std::size_t> ClusterSet::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& c : clusters) out.push_back(c.members.size());
  return out;
}

std::vector<double> ClusterSet::centroids() const {
  std::vector<double> out;
  for (const auto& c : clusters) out.push_back(c.centroid);
  return out;
}

std::vector<TimedClient> SortedByTime(const Population& population) {
  std::vector<TimedClient> out;
  out.reserve(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    out.push_back({population.clients()[i].id, population.round_times()[i]});
  }
  std::sort(out.begin(), out.end(), FasterThan);
  return out;
}

std::vector<TimedClient> SortedByTime(std::span<const double> times) {
  std::vector<TimedClient> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.push_back({ClientId{static_cast<std::uint32_t>(i)}, times[i]});
  }
  std::sort(out.begin(), out.end(), FasterThan);
  return out;
}

std::vector<double> PercentileLevels(std::size_t k) {
  std::vector<double> levels;
  levels.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    levels.push_back(100.0 * static_cast<double>(i) / static_cast<double>(k + 1));
  }
  return levels;
}

std::vector<double> PercentileCentroids(std::span<const double> times,
                                        std::size_t k) {
  if (times.empty()) throw ConfigError("cannot cluster an empty set of times");
  CheckK(k, times.size());
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  const double last = static_cast<double>(sorted.size() - 1);
  std::vector<double> centroids;
  centroids.reserve(k);
  for (double level : PercentileLevels(k)) {
    const double rank = level * last / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    centroids.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return centroids;
}

ClusterSet AssignByNearest(std::span<const TimedClient> clients,
                           std::span<const double> centroids) {
  if (centroids.empty()) throw ConfigError("no centroids");
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    if (centroids[j] < centroids[j - 1]) {
      throw ConfigError("centroids must be non-decreasing");
    }
  }
  const std::vector<TimedClient> sorted = Sorted(clients);
  const std::vector<double> times = Times(sorted);
  std::vector<std::uint32_t> label(sorted.size());
  kernels::AssignNearest(times, centroids, label);

  ClusterSet out;
  out.clusters.resize(centroids.size());
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    out.clusters[j].centroid = centroids[j];
  }
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.clusters[label[i]].members.push_back(sorted[i]);
  }
  return out;
}

EvenOutResult EvenOutDetailed(const ClusterSet& raw) {
  const std::size_t k = raw.k();
  if (k == 0) throw ConfigError("cannot even out zero clusters");

  // Where each client started, and the slowest original member per cluster.
  std::vector<TimedClient> all;
  std::vector<std::pair<ClientId, std::size_t>> origin;
  std::vector<double> original_max(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    for (const auto& m : raw.clusters[j].members) {
      all.push_back(m);
      origin.emplace_back(m.id, j);
      original_max[j] = std::max(original_max[j], m.time);
    }
  }
  CheckK(k, all.size());
  std::sort(all.begin(), all.end(), FasterThan);
  std::sort(origin.begin(), origin.end());

  const std::size_t base = all.size() / k;
  const std::size_t extra = all.size() % k;

  EvenOutResult result;
  result.clusters.clusters.resize(k);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    auto& members = result.clusters.clusters[j].members;
    members.assign(all.begin() + static_cast<std::ptrdiff_t>(pos),
                   all.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
    for (const auto& m : members) {
      auto it = std::lower_bound(
          origin.begin(), origin.end(), std::make_pair(m.id, std::size_t{0}));
      const std::size_t from = it->second;
      if (from == j) continue;
      ++result.moved;
      // Pulled from a slower cluster into a faster one.
      if (from > j && !raw.clusters[j].members.empty() &&
          m.time > 1.5 * original_max[j]) {
        ++result.beyond_cap;
      }
    }
    result.clusters.clusters[j].centroid =
        MeanTime(members, raw.clusters[j].centroid);
  }
  return result;
}

ClusterSet EvenOut(const ClusterSet& raw) {
  return EvenOutDetailed(raw).clusters;
}

ClusterSet ClusterByRoundTime(std::span<const TimedClient> clients,
                              std::size_t k) {
  CheckK(k, clients.size());
  const std::vector<double> times = Times(clients);
  const std::vector<double> centroids = PercentileCentroids(times, k);
  return EvenOut(AssignByNearest(clients, centroids));
}

ClusterSet ClusterByRoundTime(const Population& population, std::size_t k) {
  return ClusterByRoundTime(SortedByTime(population), k);
}

KMeansResult KMeans1D(std::span<const TimedClient> clients, std::size_t k,
                      std::size_t max_iters) {
  CheckK(k, clients.size());
  const std::vector<TimedClient> sorted = Sorted(clients);
  const std::vector<double> times = Times(sorted);
  std::vector<double> centroids = PercentileCentroids(times, k);

  std::vector<std::uint32_t> label(sorted.size());
  std::vector<std::uint32_t> previous;
  KMeansResult result;
  while (true) {
    kernels::AssignNearest(times, centroids, label);
    if (!previous.empty() && label == previous) {
      result.converged = true;
      break;
    }
    if (result.iterations == max_iters) break;
    std::vector<double> sum(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      sum[label[i]] += times[i];
      ++count[label[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (count[j] > 0) centroids[j] = sum[j] / static_cast<double>(count[j]);
    }
    previous = label;
    ++result.iterations;
  }

  std::vector<Cluster> clusters(k);
  for (std::size_t j = 0; j < k; ++j) clusters[j].centroid = centroids[j];
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    clusters[label[i]].members.push_back(sorted[i]);
  }
  for (auto& c : clusters) c.centroid = MeanTime(c.members, c.centroid);
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const Cluster& a, const Cluster& b) {
                     return a.centroid < b.centroid;
                   });
  result.clusters.clusters = std::move(clusters);
  return result;
}

std::size_t KAnonymity(const ClusterSet& clusters) {
  return clusters.min_size();
}

nlohmann::json ClusterSetToJson(const ClusterSet& clusters) {
  nlohmann::json doc;
  doc["k"] = clusters.k();
  auto& lists = doc["clusters"] = nlohmann::json::array();
  for (const auto& c : clusters.clusters) {
    auto ids = nlohmann::json::array();
    for (const auto& m : c.members) ids.push_back(m.id.value);
    lists.push_back(std::move(ids));
  }
  doc["centroids"] = clusters.centroids();
  doc["sizes"] = clusters.sizes();
  doc["k_anonymity"] = KAnonymity(clusters);
  return doc;
}

}  // namespace fedss
