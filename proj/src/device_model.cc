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

#include "fedss/device_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedss/csv.h"
#include "fedss/errors.h"
#include "fedss/kernels.h"
#include "fedss/rng.h"

namespace fedss {
namespace {

bool PositiveFinite(double v) { return std::isfinite(v) && v > 0.0; }

std::uint64_t DrawSamples(const SampleRange& range, Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(range.low, range.high);
  return dist(rng);
}

void ValidateRange(const SampleRange& range) {
  if (range.low > range.high) {
    throw ConfigError("sample range low " + std::to_string(range.low) +
                      " exceeds high " + std::to_string(range.high));
  }
}

void ValidateRange(const LogUniformRange& range, const char* name) {
  if (!PositiveFinite(range.low) || !PositiveFinite(range.high) ||
      range.low > range.high) {
    throw ConfigError(std::string("invalid log-uniform range for ") + name +
                      ": need 0 < low <= high");
  }
}

double DrawLogUniform(const LogUniformRange& range, Rng& rng) {
  if (range.low == range.high) return range.low;
  std::uniform_real_distribution<double> dist(std::log(range.low),
                                              std::log(range.high));
  return std::clamp(std::exp(dist(rng)), range.low, range.high);
}

}  // namespace

GlobalModelSpec::GlobalModelSpec(double model_size_bits, double flops_per_sample)
    : model_size_bits_(model_size_bits), flops_per_sample_(flops_per_sample) {
  if (!PositiveFinite(model_size_bits)) {
    throw ConfigError("model_size_bits must be positive");
  }
  if (!PositiveFinite(flops_per_sample)) {
    throw ConfigError("flops_per_sample must be positive");
  }
}

void Validate(const ClientProfile& client) {
  const std::string who = "client " + std::to_string(client.id.value);
  if (!PositiveFinite(client.uplink_bps)) {
    throw ConfigError(who + ": uplink_bps must be positive");
  }
  if (!PositiveFinite(client.downlink_bps)) {
    throw ConfigError(who + ": downlink_bps must be positive");
  }
  if (!PositiveFinite(client.flops_rate)) {
    throw ConfigError(who + ": flops_rate must be positive");
  }
}

double EstimateRoundTime(const ClientProfile& client,
                         const GlobalModelSpec& model) {
  const double upload = model.model_size_bits() / client.uplink_bps;
  const double compute = static_cast<double>(client.num_samples) *
                         model.flops_per_sample() / client.flops_rate;
  const double download = model.model_size_bits() / client.downlink_bps;
  return upload + compute + download;
}

Population::Population(std::vector<ClientProfile> clients, GlobalModelSpec model)
    : clients_(std::move(clients)), model_(model) {
  if (clients_.empty()) throw ConfigError("population is empty");
  index_.reserve(clients_.size());
  for (std::size_t i = 0; i < clients_.size(); ++i) {
    Validate(clients_[i]);
    if (!index_.emplace(clients_[i].id.value, i).second) {
      throw ConfigError("duplicate client id " +
                        std::to_string(clients_[i].id.value));
    }
  }
  round_times_.resize(clients_.size());
  kernels::RoundTimes(clients_, model_, round_times_);
}

std::size_t Population::index_of(ClientId id) const {
  auto it = index_.find(id.value);
  if (it == index_.end()) {
    throw ConfigError("unknown client id " + std::to_string(id.value));
  }
  return it->second;
}

std::vector<ClientId> Population::ids() const {
  std::vector<ClientId> out;
  out.reserve(clients_.size());
  for (const auto& c : clients_) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ClientId> Population::ids_by_round_time() const {
  std::vector<std::size_t> order(clients_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (round_times_[a] != round_times_[b]) {
      return round_times_[a] < round_times_[b];
    }
    return clients_[a].id < clients_[b].id;
  });
  std::vector<ClientId> out;
  out.reserve(order.size());
  for (std::size_t i : order) out.push_back(clients_[i].id);
  return out;
}

Population LoadPopulation(const std::filesystem::path& device_table,
                          const std::filesystem::path& bandwidth_table,
                          const GlobalModelSpec& model, std::size_t n,
                          std::uint64_t seed, SampleRange samples) {
  if (n == 0) throw ConfigError("population size must be at least 1");
  ValidateRange(samples);

  const csv::Table devices = csv::Read(device_table, {"device", "gflops"});
  const csv::Table regions = csv::Read(
      bandwidth_table, {"region", "download_mbps", "upload_mbps"});

  std::vector<double> flops;
  for (const auto& row : devices.rows) {
    flops.push_back(csv::PositiveNumber(devices, row, 1) * 1e9);
  }
  struct Link {
    double down_bps;
    double up_bps;
  };
  std::vector<Link> links;
  for (const auto& row : regions.rows) {
    links.push_back({csv::PositiveNumber(regions, row, 1) * 1e6,
                     csv::PositiveNumber(regions, row, 2) * 1e6});
  }

  Rng rng = MakeRng(seed);
  std::uniform_int_distribution<std::size_t> pick_device(0, flops.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_region(0, links.size() - 1);
  std::vector<ClientProfile> clients;
  clients.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ClientProfile c;
    c.id = ClientId{static_cast<std::uint32_t>(i)};
    c.flops_rate = flops[pick_device(rng)];
    const Link& link = links[pick_region(rng)];
    c.downlink_bps = link.down_bps;
    c.uplink_bps = link.up_bps;
    c.num_samples = DrawSamples(samples, rng);
    clients.push_back(c);
  }
  return Population(std::move(clients), model);
}

Population SynthPopulation(const SynthSpec& spec, const GlobalModelSpec& model,
                           std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ConfigError("population size must be at least 1");
  ValidateRange(spec.flops_rate, "flops_rate");
  ValidateRange(spec.uplink_bps, "uplink_bps");
  ValidateRange(spec.downlink_bps, "downlink_bps");
  ValidateRange(spec.samples);

  Rng rng = MakeRng(seed);
  std::vector<ClientProfile> clients;
  clients.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ClientProfile c;
    c.id = ClientId{static_cast<std::uint32_t>(i)};
    c.flops_rate = DrawLogUniform(spec.flops_rate, rng);
    c.uplink_bps = DrawLogUniform(spec.uplink_bps, rng);
    c.downlink_bps = DrawLogUniform(spec.downlink_bps, rng);
    c.num_samples = DrawSamples(spec.samples, rng);
    clients.push_back(c);
  }
  return Population(std::move(clients), model);
}

nlohmann::json PopulationToJson(const Population& population) {
  nlohmann::json doc;
  doc["units"] = {{"model_size", "bit"},
                  {"flops_per_sample", "FLOP"},
                  {"uplink", "bit/s"},
                  {"downlink", "bit/s"},
                  {"flops_rate", "FLOP/s"},
                  {"round_time", "s"}};
  doc["model"] = {{"model_size_bits", population.model().model_size_bits()},
                  {"flops_per_sample", population.model().flops_per_sample()}};
  auto& clients = doc["clients"] = nlohmann::json::array();
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& c = population.clients()[i];
    clients.push_back({{"id", c.id.value},
                       {"uplink_bps", c.uplink_bps},
                       {"downlink_bps", c.downlink_bps},
                       {"flops_rate", c.flops_rate},
                       {"num_samples", c.num_samples},
                       {"round_time_s", population.round_times()[i]}});
  }
  return doc;
}

Population PopulationFromJson(const nlohmann::json& doc) {
  try {
    const auto& units = doc.at("units");
    if (units.at("uplink").get<std::string>() != "bit/s" ||
        units.at("downlink").get<std::string>() != "bit/s" ||
        units.at("flops_rate").get<std::string>() != "FLOP/s" ||
        units.at("model_size").get<std::string>() != "bit" ||
        units.at("flops_per_sample").get<std::string>() != "FLOP") {
      throw ConfigError("population document uses unsupported units");
    }
    GlobalModelSpec model(doc.at("model").at("model_size_bits").get<double>(),
                          doc.at("model").at("flops_per_sample").get<double>());
    std::vector<ClientProfile> clients;
    for (const auto& c : doc.at("clients")) {
      ClientProfile p;
      p.id = ClientId{c.at("id").get<std::uint32_t>()};
      p.uplink_bps = c.at("uplink_bps").get<double>();
      p.downlink_bps = c.at("downlink_bps").get<double>();
      p.flops_rate = c.at("flops_rate").get<double>();
      p.num_samples = c.at("num_samples").get<std::uint64_t>();
      clients.push_back(p);
    }
    return Population(std::move(clients), model);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed population document: ") + e.what());
  }
}

}  // namespace fedss
