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

#ifndef FEDSS_CLUSTERING_H_
#define FEDSS_CLUSTERING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedss/device_model.h"
#include "json.hpp"

namespace fedss {

struct TimedClient {
  ClientId id;
  double time = 0.0;  // estimated round time, seconds
};

// Orders by ascending time, ties by ascending id.
bool FasterThan(const TimedClient& a, const TimedClient& b);

struct Cluster {
  std::vector<TimedClient> members;  // ascending time
  double centroid = 0.0;
};

// Clusters ordered by ascending centroid. For FedSS clusterings the
// concatenation of all members is the population sorted by round time.
struct ClusterSet {
  std::vector<Cluster> clusters;

  std::size_t k() const { return clusters.size(); }
  std::size_t min_size() const;
  std::size_t max_size() const;
  std::vector<std::size_t> sizes() const;
  std::vector<double> centroids() const;
};

std::vector<TimedClient> SortedByTime(const Population& population);

// Treats position i as client id i.
std::vector<TimedClient> SortedByTime(std::span<const double> times);

// 100*i/(k+1) for i = 1..k.
std::vector<double> PercentileLevels(std::size_t k);

// Value at each percentile level, linearly interpolated at rank
// q*(n-1)/100 over the sorted sample.
std::vector<double> PercentileCentroids(std::span<const double> times,
                                        std::size_t k);

// Nearest centroid by squared distance; ties go to the faster cluster.
// `clients` need not be sorted. Centroids are kept as given.
ClusterSet AssignByNearest(std::span<const TimedClient> clients,
                           std::span<const double> centroids);

struct EvenOutResult {
  ClusterSet clusters;
  std::size_t moved = 0;
  // Moves from a slower cluster into a faster one where the moved client's
  // time exceeds 1.5x the receiving cluster's slowest original member.
  std::size_t beyond_cap = 0;
};

// Shifts boundary clients between adjacent clusters until sizes differ by at
// most one. The first N mod k clusters (the fastest) receive the extra
// client. The result is a contiguous split of the time-sorted population and
// each centroid becomes the mean time of its final members.
EvenOutResult EvenOutDetailed(const ClusterSet& raw);
ClusterSet EvenOut(const ClusterSet& raw);

// Percentile centroids, nearest assignment, then evening out.
ClusterSet ClusterByRoundTime(std::span<const TimedClient> clients,
                              std::size_t k);
ClusterSet ClusterByRoundTime(const Population& population, std::size_t k);

struct KMeansResult {
  ClusterSet clusters;
  std::size_t iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm on the 1-D times, seeded with the percentile centroids so
// the outcome is deterministic. Sizes are left as they fall.
KMeansResult KMeans1D(std::span<const TimedClient> clients, std::size_t k,
                      std::size_t max_iters = 300);

// Smallest cluster size: no member can be narrowed down below this many peers.
std::size_t KAnonymity(const ClusterSet& clusters);

nlohmann::json ClusterSetToJson(const ClusterSet& clusters);

}  // namespace fedss

#endif  // FEDSS_CLUSTERING_H_
