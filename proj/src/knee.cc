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

#include "fedss/knee.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fedss/errors.h"
#include "fedss/rng.h"
#include "fedss/simulator.h"

namespace fedss {
namespace {

void CheckSweep(const Population& population, const SweepOptions& o) {
  if (o.k_min == 0 || o.k_min > o.k_max) {
    throw ConfigError("invalid k range [" + std::to_string(o.k_min) + ", " +
                      std::to_string(o.k_max) + "]");
  }
  if (o.k_max > population.size()) {
    throw ConfigError("k_max exceeds population size");
  }
  if (o.rounds == 0) throw ConfigError("sweep needs at least one round");
  if (o.clients_per_round == 0) {
    throw ConfigError("clients_per_round must be at least 1");
  }
}

// Evaluates one k. Returns nullopt when the clusters are too small.
std::optional<KneePoint> EvaluateK(const Population& population,
                                   const std::vector<TimedClient>& sorted,
                                   std::size_t k, const SweepOptions& o) {
  ClusterSet clusters = ClusterByRoundTime(sorted, k);
  if (clusters.min_size() < o.clients_per_round) return std::nullopt;
  const double y = AverageRoundTime(population, clusters, o.rounds,
                                    o.clients_per_round, DeriveSeed(o.seed, k));
  return KneePoint{k, static_cast<double>(k) / static_cast<double>(population.size()),
                   y};
}

KneeCurve Collect(const std::vector<std::optional<KneePoint>>& evaluated,
                  std::size_t k_min) {
  KneeCurve curve;
  for (std::size_t i = 0; i < evaluated.size(); ++i) {
    if (evaluated[i]) {
      curve.points.push_back(*evaluated[i]);
    } else {
      curve.skipped.push_back(k_min + i);
    }
  }
  return curve;
}

std::vector<double> Normalize(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  std::vector<double> out(v.size(), 0.0);
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
  return out;
}

}  // namespace

double AverageRoundTime(const Population& population, const ClusterSet& clusters,
                        std::size_t rounds, std::size_t clients_per_round,
                        std::uint64_t seed) {
  if (rounds == 0) throw ConfigError("need at least one round");
  PolicyConfig config;
  config.kind = PolicyKind::kFedSS;
  config.clients_per_round = clients_per_round;
  config.clusters = clusters;
  config.seed = seed;
  SelectionPolicy policy(population, std::move(config));
  double total = 0.0;
  for (std::size_t r = 0; r < rounds; ++r) total += policy.Next().duration;
  return total / static_cast<double>(rounds);
}

double AverageRoundTimeForK(const Population& population, std::size_t k,
                            std::size_t rounds, std::size_t clients_per_round,
                            std::uint64_t seed) {
  return AverageRoundTime(population, ClusterByRoundTime(population, k), rounds,
                          clients_per_round, DeriveSeed(seed, k));
}

std::size_t DefaultMaxK(std::size_t population_size,
                        std::size_t clients_per_round) {
  if (clients_per_round == 0) return 1;
  return std::max<std::size_t>(
      1, std::min<std::size_t>(10, population_size / clients_per_round));
}

KneeCurve SweepK(const Population& population, const SweepOptions& options) {
  CheckSweep(population, options);
  const std::vector<TimedClient> sorted = SortedByTime(population);
  const auto count = static_cast<std::ptrdiff_t>(options.k_max - options.k_min + 1);
  std::vector<std::optional<KneePoint>> evaluated(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    evaluated[static_cast<std::size_t>(i)] = EvaluateK(
        population, sorted, options.k_min + static_cast<std::size_t>(i), options);
  }
  return Collect(evaluated, options.k_min);
}

KneeCurve SweepKSerial(const Population& population,
                       const SweepOptions& options) {
  CheckSweep(population, options);
  const std::vector<TimedClient> sorted = SortedByTime(population);
  std::vector<std::optional<KneePoint>> evaluated;
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
    evaluated.push_back(EvaluateK(population, sorted, k, options));
  }
  return Collect(evaluated, options.k_min);
}

std::optional<std::size_t> KneedleIndex(std::span<const double> x,
                                        std::span<const double> y,
                                        double sensitivity) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ConfigError("knee curve x and y differ in length");
  if (n < 3) throw ConfigError("knee detection needs at least three points");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) {
      throw ConfigError("knee curve x values must be strictly increasing");
    }
  }

  std::vector<double> xn = Normalize(x);
  std::vector<double> yn = Normalize(y);
  if (yn.back() == yn.front()) return std::nullopt;
  const bool increasing = yn.back() > yn.front();

  // Concave when the curve lies above its chord on average.
  double above = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    above += yn[i] - (yn.front() + (yn.back() - yn.front()) * xn[i]);
  }
  const bool concave = above > 0.0;

  // Orient to concave increasing. Flipping x reverses the walk order.
  bool flip_x = false;
  if (increasing && !concave) {
    flip_x = true;
    for (auto& v : yn) v = 1.0 - v;
  } else if (!increasing && !concave) {
    for (auto& v : yn) v = 1.0 - v;
  } else if (!increasing && concave) {
    flip_x = true;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = flip_x ? n - 1 - i : i;
  std::vector<double> xt(n);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    xt[i] = flip_x ? 1.0 - xn[src] : xn[src];
    diff[i] = yn[src] - xt[i];
  }
  const double mean_gap = (xt.back() - xt.front()) / static_cast<double>(n - 1);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool local_max = diff[i - 1] < diff[i] && diff[i] >= diff[i + 1];
    if (!local_max) continue;
    const double threshold = diff[i] - sensitivity * mean_gap;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (diff[j] < threshold) return order[i];
      const bool local_min =
          j + 1 < n && diff[j - 1] > diff[j] && diff[j] <= diff[j + 1];
      if (local_min) break;
    }
  }
  return std::nullopt;
}

std::optional<double> Kneedle(std::span<const double> x,
                              std::span<const double> y, double sensitivity) {
  auto index = KneedleIndex(x, y, sensitivity);
  if (!index) return std::nullopt;
  return x[*index];
}

OptimalK FindOptimalK(const Population& population, const SweepOptions& options,
                      double sensitivity) {
  OptimalK result;
  result.curve = SweepK(population, options);
  const auto& pts = result.curve.points;
  if (pts.empty()) {
    throw ConfigError("no feasible k in [" + std::to_string(options.k_min) +
                      ", " + std::to_string(options.k_max) +
                      "] for clients_per_round " +
                      std::to_string(options.clients_per_round));
  }
  if (pts.size() >= 3) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    if (auto index = KneedleIndex(xs, ys, sensitivity)) {
      result.k = pts[*index].k;
      result.knee_x = pts[*index].x;
      result.from_knee = true;
      return result;
    }
  }
  double min_y = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) min_y = std::min(min_y, p.y);
  for (const auto& p : pts) {
    if (p.y <= 1.05 * min_y) {
      result.k = p.k;
      break;
    }
  }
  return result;
}

}  // namespace fedss
