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

#ifndef FEDSS_CONFIG_H_
#define FEDSS_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedss/device_model.h"
#include "fedss/policies.h"
#include "fedss/trainer.h"
#include "json.hpp"

namespace fedss {

enum class PopulationSource { kFixture, kSynth, kJson };

// Everything a subcommand needs. Keys of the JSON form are the snake_case
// field names below; CLI flags use the same names with dashes.
struct RunConfig {
  // population
  PopulationSource population_source = PopulationSource::kFixture;
  std::filesystem::path device_table;
  std::filesystem::path bandwidth_table;
  std::filesystem::path population_json;
  std::size_t clients = 20;
  SynthSpec synth;

  // model: bits and FLOP per training sample
  double model_size_bits = 1.0e8;
  double flops_per_sample = 2.0e9;

  // policy. The optional fields stay empty unless set explicitly, so options
  // that do not apply to the chosen policy can be rejected.
  PolicyKind policy = PolicyKind::kFedSS;
  std::size_t clients_per_round = 5;
  std::optional<std::size_t> fedcs_overselect;
  std::optional<std::size_t> k;
  std::optional<bool> auto_k;

  std::size_t rounds = 2800;
  std::uint64_t seed = 1;

  // cluster-count sweep; k_max 0 means min(10, N / clients_per_round)
  std::size_t k_min = 1;
  std::size_t k_max = 0;
  std::size_t knee_rounds = 1000;
  double sensitivity = 1.0;

  // training
  TrainHyper train;
  DataSpec data;
  bool compare_training = false;  // compare also trains each policy
  std::size_t threads = 0;        // coordinator workers, 0 = hardware

  std::filesystem::path out = "out";

  std::size_t overselect() const { return fedcs_overselect.value_or(8); }
  GlobalModelSpec model() const {
    return GlobalModelSpec(model_size_bits, flops_per_sample);
  }
};

enum class KeyKind { kCount, kNumber, kString, kBool };

// Every accepted key with its value kind, in documentation order.
const std::vector<std::pair<std::string, KeyKind>>& ConfigKeys();

// Converts a command-line value for `key` into its JSON form.
nlohmann::json ValueFromText(const std::string& key, const std::string& text);

enum class ConfigUse {
  kSinglePolicy,  // cluster, knee, simulate, train
  kAllPolicies,   // compare: policy-specific options may all be present
};

// Applies `overrides` on top of `file` (either may be empty or null), checks
// for unknown keys and validates the result. Throws ConfigError naming the
// offending key or rule.
RunConfig ParseConfig(const nlohmann::json& file, const nlohmann::json& overrides,
                      ConfigUse use = ConfigUse::kSinglePolicy,
                      const std::filesystem::path& data_dir = {});

nlohmann::json LoadJsonFile(const std::filesystem::path& path);

// Fully resolved configuration, every key present.
nlohmann::json ConfigToJson(const RunConfig& config);

void Validate(const RunConfig& config, ConfigUse use);

}  // namespace fedss

#endif  // FEDSS_CONFIG_H_
