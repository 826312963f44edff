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

#ifndef FEDSS_KNEE_H_
#define FEDSS_KNEE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fedss/clustering.h"
#include "fedss/device_model.h"

namespace fedss {

// Mean round duration when the FedSS policy runs over `clusters` for `rounds`
// rounds with `clients_per_round` clients each.
double AverageRoundTime(const Population& population, const ClusterSet& clusters,
                        std::size_t rounds, std::size_t clients_per_round,
                        std::uint64_t seed);

// Clusters the population into k groups and simulates it. The policy stream
// is derived from (seed, k). Throws ConfigError if clients_per_round exceeds
// the smallest cluster.
double AverageRoundTimeForK(const Population& population, std::size_t k,
                            std::size_t rounds, std::size_t clients_per_round,
                            std::uint64_t seed);

struct KneePoint {
  std::size_t k = 0;
  double x = 0.0;  // k / N, i.e. 1 / cluster size
  double y = 0.0;  // average round time, seconds
};

struct KneeCurve {
  std::vector<KneePoint> points;     // ascending k
  std::vector<std::size_t> skipped;  // k values whose clusters are too small
};

struct SweepOptions {
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  std::size_t rounds = 1000;
  std::size_t clients_per_round = 5;
  std::uint64_t seed = 0;
};

// Default upper bound for the sweep: min(10, N / clients_per_round).
std::size_t DefaultMaxK(std::size_t population_size,
                        std::size_t clients_per_round);

// Evaluates every k in [k_min, k_max] in parallel. Each k owns its RNG stream,
// so the result equals SweepKSerial exactly.
KneeCurve SweepK(const Population& population, const SweepOptions& options);
KneeCurve SweepKSerial(const Population& population, const SweepOptions& options);

// Kneedle without smoothing: min-max normalise, orient the curve so the knee
// is a maximum of the difference curve, and accept the first local maximum
// whose difference drops by more than sensitivity * mean x-gap before the
// next local minimum. Returns the index of the knee sample, or nullopt when
// the curve has no knee. x must be strictly increasing with at least three
// samples.
std::optional<std::size_t> KneedleIndex(std::span<const double> x,
                                        std::span<const double> y,
                                        double sensitivity = 1.0);
std::optional<double> Kneedle(std::span<const double> x,
                              std::span<const double> y,
                              double sensitivity = 1.0);

struct OptimalK {
  std::size_t k = 1;
  bool from_knee = false;  // false when the 5%-of-minimum fallback was used
  std::optional<double> knee_x;
  KneeCurve curve;
};

// Chooses the number of clusters at the knee of the sweep. With no knee (or
// fewer than three feasible points) returns the smallest k whose average
// round time is within 5% of the sweep minimum.
OptimalK FindOptimalK(const Population& population, const SweepOptions& options,
                      double sensitivity = 1.0);

}  // namespace fedss

#endif  // FEDSS_KNEE_H_
