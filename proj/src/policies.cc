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

#include "fedss/policies.h"

#include <algorithm>

#include "fedss/errors.h"

namespace fedss {
namespace {

double SlowestTime(const Population& population,
                   std::span<const ClientId> ids) {
  double slowest = 0.0;
  for (ClientId id : ids) slowest = std::max(slowest, population.round_time(id));
  return slowest;
}

// Keeps the k fastest of `invited` (ties by id), returned in ascending id.
std::vector<ClientId> FastestOf(const Population& population,
                                std::span<const ClientId> invited,
                                std::size_t k) {
  std::vector<ClientId> ranked(invited.begin(), invited.end());
  std::sort(ranked.begin(), ranked.end(), [&](ClientId a, ClientId b) {
    const double ta = population.round_time(a);
    const double tb = population.round_time(b);
    if (ta != tb) return ta < tb;
    return a < b;
  });
  ranked.resize(k);
  std::sort(ranked.begin(), ranked.end());
  return ranked;
}

std::vector<ClientId> IdsOf(const Cluster& cluster) {
  std::vector<ClientId> ids;
  ids.reserve(cluster.members.size());
  for (const auto& m : cluster.members) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

RoundSelection FromCandidates(const Population& population,
                              std::span<const ClientId> candidates,
                              std::size_t k, Rng& rng) {
  RoundSelection s;
  s.invited = SampleWithoutReplacement(candidates, k, rng);
  s.aggregated = s.invited;
  s.duration = SlowestTime(population, s.aggregated);
  return s;
}

RoundSelection FedCSFromCandidates(const Population& population,
                                   std::span<const ClientId> candidates,
                                   std::size_t k, std::size_t overselect,
                                   Rng& rng) {
  RoundSelection s;
  s.invited = SampleWithoutReplacement(candidates, overselect, rng);
  s.aggregated = FastestOf(population, s.invited, k);
  s.duration = SlowestTime(population, s.aggregated);
  return s;
}

RoundSelection FedSSFromCandidates(
    const Population& population,
    const std::vector<std::vector<ClientId>>& cluster_ids, std::size_t& cursor,
    std::size_t k, Rng& rng) {
  const std::size_t index = cursor % cluster_ids.size();
  ++cursor;
  const auto& members = cluster_ids[index];
  if (k > members.size()) {
    throw ConfigError("cluster " + std::to_string(index) + " has " +
                      std::to_string(members.size()) +
                      " clients, fewer than clients_per_round " +
                      std::to_string(k));
  }
  RoundSelection s = FromCandidates(population, members, k, rng);
  s.cluster_index = index;
  return s;
}

}  // namespace

std::string_view PolicyName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kFedCS: return "fedcs";
    case PolicyKind::kFedSS: return "fedss";
  }
  return "unknown";
}

PolicyKind ParsePolicy(std::string_view name) {
  if (name == "random") return PolicyKind::kRandom;
  if (name == "fedcs") return PolicyKind::kFedCS;
  if (name == "fedss") return PolicyKind::kFedSS;
  throw ConfigError("unknown policy '" + std::string(name) +
                    "' (expected random, fedcs or fedss)");
}

void Validate(const PolicyConfig& config, const Population& population) {
  const std::size_t n = population.size();
  const std::size_t k = config.clients_per_round;
  if (k == 0) throw ConfigError("clients_per_round must be at least 1");
  switch (config.kind) {
    case PolicyKind::kRandom:
      if (k > n) {
        throw ConfigError("clients_per_round " + std::to_string(k) +
                          " exceeds population size " + std::to_string(n));
      }
      break;
    case PolicyKind::kFedCS:
      if (config.fedcs_overselect < k) {
        throw ConfigError("fedcs_overselect must be at least clients_per_round");
      }
      if (config.fedcs_overselect > n) {
        throw ConfigError("fedcs_overselect " +
                          std::to_string(config.fedcs_overselect) +
                          " exceeds population size " + std::to_string(n));
      }
      break;
    case PolicyKind::kFedSS: {
      if (!config.clusters || config.clusters->k() == 0) {
        throw ConfigError("fedss policy requires a cluster set");
      }
      std::size_t total = 0;
      for (const auto& c : config.clusters->clusters) {
        total += c.members.size();
        for (const auto& m : c.members) population.index_of(m.id);
      }
      if (total != n) {
        throw ConfigError("cluster set does not cover the population");
      }
      if (k > config.clusters->min_size()) {
        throw ConfigError("clients_per_round " + std::to_string(k) +
                          " exceeds smallest cluster size " +
                          std::to_string(config.clusters->min_size()));
      }
      break;
    }
  }
}

std::vector<ClientId> SampleWithoutReplacement(
    std::span<const ClientId> candidates, std::size_t count, Rng& rng) {
  if (count > candidates.size()) {
    throw ConfigError("cannot draw " + std::to_string(count) + " from " +
                      std::to_string(candidates.size()) + " candidates");
  }
  // Partial Fisher-Yates over a copy.
  std::vector<ClientId> pool(candidates.begin(), candidates.end());
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

RoundSelection SelectRandom(const Population& population, std::size_t k,
                            Rng& rng) {
  return FromCandidates(population, population.ids(), k, rng);
}

RoundSelection SelectFedCS(const Population& population, std::size_t k,
                           std::size_t overselect, Rng& rng) {
  if (overselect < k) {
    throw ConfigError("fedcs_overselect must be at least clients_per_round");
  }
  return FedCSFromCandidates(population, population.ids(), k, overselect, rng);
}

RoundSelection SelectFedSS(const Population& population,
                           const ClusterSet& clusters, std::size_t& cursor,
                           std::size_t k, Rng& rng) {
  if (clusters.k() == 0) throw ConfigError("empty cluster set");
  std::vector<std::vector<ClientId>> ids;
  for (const auto& c : clusters.clusters) ids.push_back(IdsOf(c));
  return FedSSFromCandidates(population, ids, cursor, k, rng);
}

SelectionPolicy::SelectionPolicy(const Population& population,
                                 PolicyConfig config)
    : population_(&population), config_(std::move(config)) {
  Validate(config_, population);
  all_ids_ = population.ids();
  if (config_.kind == PolicyKind::kFedSS) {
    for (const auto& c : config_.clusters->clusters) {
      cluster_ids_.push_back(IdsOf(c));
    }
  }
}

RoundSelection SelectionPolicy::Next() {
  Rng rng = MakeRng(DeriveSeed(config_.seed, static_cast<std::uint64_t>(round_)));
  RoundSelection s;
  switch (config_.kind) {
    case PolicyKind::kRandom:
      s = FromCandidates(*population_, all_ids_, config_.clients_per_round, rng);
      break;
    case PolicyKind::kFedCS:
      s = FedCSFromCandidates(*population_, all_ids_, config_.clients_per_round,
                              config_.fedcs_overselect, rng);
      break;
    case PolicyKind::kFedSS:
      s = FedSSFromCandidates(*population_, cluster_ids_, cursor_,
                              config_.clients_per_round, rng);
      break;
  }
  s.round_index = round_++;
  return s;
}

}  // namespace fedss
