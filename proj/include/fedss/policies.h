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

#ifndef FEDSS_POLICIES_H_
#define FEDSS_POLICIES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedss/clustering.h"
#include "fedss/device_model.h"
#include "fedss/rng.h"

namespace fedss {

enum class PolicyKind { kRandom, kFedCS, kFedSS };

std::string_view PolicyName(PolicyKind kind);
// Accepts "random", "fedcs" and "fedss"; throws ConfigError otherwise.
PolicyKind ParsePolicy(std::string_view name);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kRandom;
  std::size_t clients_per_round = 5;
  std::size_t fedcs_overselect = 8;     // FedCS only
  std::optional<ClusterSet> clusters;   // FedSS only
  std::uint64_t seed = 0;
};

// Throws ConfigError if the configuration cannot run on `population`.
void Validate(const PolicyConfig& config, const Population& population);

struct RoundSelection {
  std::size_t round_index = 0;
  std::vector<ClientId> invited;     // ascending id
  std::vector<ClientId> aggregated;  // ascending id, subset of invited
  double duration = 0.0;             // slowest aggregated client, seconds
  std::optional<std::size_t> cluster_index;
};

// K distinct entries of `candidates`, uniformly, returned in ascending id
// order. The draw only depends on the candidate sequence and the RNG state.
std::vector<ClientId> SampleWithoutReplacement(
    std::span<const ClientId> candidates, std::size_t count, Rng& rng);

RoundSelection SelectRandom(const Population& population, std::size_t k,
                            Rng& rng);

// Invites `overselect` clients and keeps the K with the smallest round time.
RoundSelection SelectFedCS(const Population& population, std::size_t k,
                           std::size_t overselect, Rng& rng);

// Visits clusters[cursor mod k], then advances the cursor.
RoundSelection SelectFedSS(const Population& population,
                           const ClusterSet& clusters, std::size_t& cursor,
                           std::size_t k, Rng& rng);

// Stateful driver. Round r draws from an RNG derived from (seed, r) so any
// round can be reproduced in isolation.
class SelectionPolicy {
 public:
  SelectionPolicy(const Population& population, PolicyConfig config);

  RoundSelection Next();

  const PolicyConfig& config() const { return config_; }
  std::size_t rounds_played() const { return round_; }

 private:
  const Population* population_;
  PolicyConfig config_;
  std::vector<ClientId> all_ids_;
  std::vector<std::vector<ClientId>> cluster_ids_;  // ascending id per cluster
  std::size_t cursor_ = 0;
  std::size_t round_ = 0;
};

}  // namespace fedss

#endif  // FEDSS_POLICIES_H_
