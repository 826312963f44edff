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

#ifndef FEDSS_DEVICE_MODEL_H_
#define FEDSS_DEVICE_MODEL_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace fedss {

struct ClientId {
  std::uint32_t value = 0;

  friend auto operator<=>(ClientId, ClientId) = default;
};

// Units: bits for the model size, FLOP for work per training sample.
// flops_per_sample is the aggregate cost of the whole local training job per
// sample (all local epochs), not a single forward pass.
class GlobalModelSpec {
 public:
  GlobalModelSpec(double model_size_bits, double flops_per_sample);

  double model_size_bits() const { return model_size_bits_; }
  double flops_per_sample() const { return flops_per_sample_; }

 private:
  double model_size_bits_;
  double flops_per_sample_;
};

// Units: bits/second for links, FLOP/second for compute.
struct ClientProfile {
  ClientId id;
  double uplink_bps = 0.0;
  double downlink_bps = 0.0;
  double flops_rate = 0.0;
  std::uint64_t num_samples = 0;
};

// Throws ConfigError when a rate is non-positive or not finite.
void Validate(const ClientProfile& client);

// Seconds to download the model, train on every local sample and upload the
// update:  size/UL + samples*flops_per_sample/flops_rate + size/DL.
double EstimateRoundTime(const ClientProfile& client,
                         const GlobalModelSpec& model);

// Immutable set of clients with their estimated round times cached.
class Population {
 public:
  Population(std::vector<ClientProfile> clients, GlobalModelSpec model);

  std::span<const ClientProfile> clients() const { return clients_; }
  const GlobalModelSpec& model() const { return model_; }
  std::size_t size() const { return clients_.size(); }

  // Estimated round time per client, aligned with clients().
  std::span<const double> round_times() const { return round_times_; }

  std::size_t index_of(ClientId id) const;
  const ClientProfile& client(ClientId id) const {
    return clients_[index_of(id)];
  }
  double round_time(ClientId id) const { return round_times_[index_of(id)]; }

  // All ids in ascending id order.
  std::vector<ClientId> ids() const;

  // Ids ordered by ascending round time, ties by ascending id.
  std::vector<ClientId> ids_by_round_time() const;

 private:
  std::vector<ClientProfile> clients_;
  GlobalModelSpec model_;
  std::vector<double> round_times_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

struct SampleRange {
  std::uint64_t low = 100;
  std::uint64_t high = 400;
};

// Sampling (device row, bandwidth row) pairs uniformly. The device table has
// the header `device,gflops`; the bandwidth table `region,download_mbps,
// upload_mbps`.
Population LoadPopulation(const std::filesystem::path& device_table,
                          const std::filesystem::path& bandwidth_table,
                          const GlobalModelSpec& model, std::size_t n,
                          std::uint64_t seed, SampleRange samples = {});

struct LogUniformRange {
  double low = 1.0;
  double high = 1.0;
};

struct SynthSpec {
  LogUniformRange flops_rate{2e9, 5e10};
  LogUniformRange uplink_bps{1e6, 1e8};
  LogUniformRange downlink_bps{5e6, 3e8};
  SampleRange samples{100, 400};
};

Population SynthPopulation(const SynthSpec& spec, const GlobalModelSpec& model,
                           std::size_t n, std::uint64_t seed);

// JSON document with an explicit "units" block.
nlohmann::json PopulationToJson(const Population& population);
Population PopulationFromJson(const nlohmann::json& doc);

}  // namespace fedss

#endif  // FEDSS_DEVICE_MODEL_H_
