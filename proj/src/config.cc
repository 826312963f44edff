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

#include "fedss/config.h"

#include <cmath>
#include <fstream>
#include <set>

#include "fedss/errors.h"

namespace fedss {
namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> out;
    for (const auto& [key, kind] : ConfigKeys()) out.insert(key);
    return out;
  }();
  return keys;
}

template <class T>
T Get(const nlohmann::json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

std::size_t Count(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double Number(const nlohmann::json& doc, const std::string& key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError("config key '" + key + "' must be finite");
  return d;
}

PopulationSource ParseSource(const std::string& s) {
  if (s == "fixture") return PopulationSource::kFixture;
  if (s == "synth") return PopulationSource::kSynth;
  if (s == "json") return PopulationSource::kJson;
  throw ConfigError("population_source must be fixture, synth or json, got '" +
                    s + "'");
}

const char* SourceName(PopulationSource s) {
  switch (s) {
    case PopulationSource::kFixture: return "fixture";
    case PopulationSource::kSynth: return "synth";
    case PopulationSource::kJson: return "json";
  }
  return "fixture";
}

void CheckObject(const nlohmann::json& doc, const char* what) {
  if (doc.is_null()) return;
  if (!doc.is_object()) {
    throw ConfigError(std::string(what) + " must be a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!KnownKeys().count(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void Apply(RunConfig& c, const nlohmann::json& doc) {
  if (doc.is_null()) return;
  auto has = [&](const char* key) { return doc.contains(key); };

  if (has("population_source")) c.population_source = ParseSource(Get<std::string>(doc, "population_source"));
  if (has("device_table")) c.device_table = Get<std::string>(doc, "device_table");
  if (has("bandwidth_table")) c.bandwidth_table = Get<std::string>(doc, "bandwidth_table");
  if (has("population_json")) c.population_json = Get<std::string>(doc, "population_json");
  if (has("clients")) c.clients = Count(doc, "clients");
  if (has("samples_min")) c.synth.samples.low = Count(doc, "samples_min");
  if (has("samples_max")) c.synth.samples.high = Count(doc, "samples_max");
  if (has("synth_flops_min")) c.synth.flops_rate.low = Number(doc, "synth_flops_min");
  if (has("synth_flops_max")) c.synth.flops_rate.high = Number(doc, "synth_flops_max");
  if (has("synth_uplink_min")) c.synth.uplink_bps.low = Number(doc, "synth_uplink_min");
  if (has("synth_uplink_max")) c.synth.uplink_bps.high = Number(doc, "synth_uplink_max");
  if (has("synth_downlink_min")) c.synth.downlink_bps.low = Number(doc, "synth_downlink_min");
  if (has("synth_downlink_max")) c.synth.downlink_bps.high = Number(doc, "synth_downlink_max");

  if (has("model_size_bits")) c.model_size_bits = Number(doc, "model_size_bits");
  if (has("flops_per_sample")) c.flops_per_sample = Number(doc, "flops_per_sample");

  if (has("policy")) c.policy = ParsePolicy(Get<std::string>(doc, "policy"));
  if (has("clients_per_round")) c.clients_per_round = Count(doc, "clients_per_round");
  if (has("fedcs_overselect")) c.fedcs_overselect = Count(doc, "fedcs_overselect");
  if (has("k")) c.k = Count(doc, "k");
  if (has("auto_k")) c.auto_k = Get<bool>(doc, "auto_k");

  if (has("rounds")) c.rounds = Count(doc, "rounds");
  if (has("seed")) c.seed = Get<std::uint64_t>(doc, "seed");

  if (has("k_min")) c.k_min = Count(doc, "k_min");
  if (has("k_max")) c.k_max = Count(doc, "k_max");
  if (has("knee_rounds")) c.knee_rounds = Count(doc, "knee_rounds");
  if (has("sensitivity")) c.sensitivity = Number(doc, "sensitivity");

  if (has("epochs")) c.train.epochs = Count(doc, "epochs");
  if (has("learning_rate")) c.train.learning_rate = Number(doc, "learning_rate");
  if (has("batch_size")) c.train.batch_size = Count(doc, "batch_size");
  if (has("eval_every")) c.train.eval_every = Count(doc, "eval_every");
  if (has("classes")) c.data.classes = Count(doc, "classes");
  if (has("features")) c.data.features = Count(doc, "features");
  if (has("alpha")) c.data.alpha = Number(doc, "alpha");
  if (has("class_separation")) c.data.class_separation = Number(doc, "class_separation");
  if (has("noise")) c.data.noise = Number(doc, "noise");
  if (has("holdout_fraction")) c.data.holdout_fraction = Number(doc, "holdout_fraction");
  if (has("speed_correlated_labels")) c.data.speed_correlated = Get<bool>(doc, "speed_correlated_labels");
  if (has("correlation_width")) c.data.correlation_width = Number(doc, "correlation_width");
  if (has("compare_training")) c.compare_training = Get<bool>(doc, "compare_training");
  if (has("threads")) c.threads = Count(doc, "threads");
  if (has("out")) c.out = Get<std::string>(doc, "out");
}

}  // namespace

const std::vector<std::pair<std::string, KeyKind>>& ConfigKeys() {
  using K = KeyKind;
  static const std::vector<std::pair<std::string, KeyKind>> keys = {
      {"population_source", K::kString}, {"device_table", K::kString},
      {"bandwidth_table", K::kString},    {"population_json", K::kString},
      {"clients", K::kCount},             {"samples_min", K::kCount},
      {"samples_max", K::kCount},         {"synth_flops_min", K::kNumber},
      {"synth_flops_max", K::kNumber},    {"synth_uplink_min", K::kNumber},
      {"synth_uplink_max", K::kNumber},   {"synth_downlink_min", K::kNumber},
      {"synth_downlink_max", K::kNumber}, {"model_size_bits", K::kNumber},
      {"flops_per_sample", K::kNumber},   {"policy", K::kString},
      {"clients_per_round", K::kCount},   {"fedcs_overselect", K::kCount},
      {"k", K::kCount},                   {"auto_k", K::kBool},
      {"rounds", K::kCount},              {"seed", K::kCount},
      {"k_min", K::kCount},               {"k_max", K::kCount},
      {"knee_rounds", K::kCount},         {"sensitivity", K::kNumber},
      {"epochs", K::kCount},              {"learning_rate", K::kNumber},
      {"batch_size", K::kCount},          {"eval_every", K::kCount},
      {"classes", K::kCount},             {"features", K::kCount},
      {"alpha", K::kNumber},              {"class_separation", K::kNumber},
      {"noise", K::kNumber},              {"holdout_fraction", K::kNumber},
      {"speed_correlated_labels", K::kBool},
      {"correlation_width", K::kNumber},  {"compare_training", K::kBool},
      {"threads", K::kCount},             {"out", K::kString},
  };
  return keys;
}

nlohmann::json ValueFromText(const std::string& key, const std::string& text) {
  for (const auto& [name, kind] : ConfigKeys()) {
    if (name != key) continue;
    try {
      std::size_t used = 0;
      switch (kind) {
        case KeyKind::kString:
          return text;
        case KeyKind::kBool:
          if (text == "true" || text == "1") return true;
          if (text == "false" || text == "0") return false;
          break;
        case KeyKind::kCount: {
          if (!text.empty() && text[0] == '-') break;
          const unsigned long long v = std::stoull(text, &used);
          if (used == text.size()) return v;
          break;
        }
        case KeyKind::kNumber: {
          const double v = std::stod(text, &used);
          if (used == text.size()) return v;
          break;
        }
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid value '" + text + "' for '" + key + "'");
  }
  throw ConfigError("unknown config key '" + key + "'");
}

nlohmann::json LoadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

RunConfig ParseConfig(const nlohmann::json& file, const nlohmann::json& overrides,
                      ConfigUse use, const std::filesystem::path& data_dir) {
  CheckObject(file, "config file");
  CheckObject(overrides, "flag overrides");
  RunConfig c;
  const std::filesystem::path dir = data_dir.empty() ? "data" : data_dir;
  c.device_table = dir / "devices.csv";
  c.bandwidth_table = dir / "bandwidth.csv";
  Apply(c, file);
  Apply(c, overrides);
  Validate(c, use);
  return c;
}

void Validate(const RunConfig& c, ConfigUse use) {
  switch (c.population_source) {
    case PopulationSource::kFixture:
      if (!std::filesystem::exists(c.device_table)) {
        throw ConfigError("device_table does not exist: " + c.device_table.string());
      }
      if (!std::filesystem::exists(c.bandwidth_table)) {
        throw ConfigError("bandwidth_table does not exist: " +
                          c.bandwidth_table.string());
      }
      break;
    case PopulationSource::kJson:
      if (!std::filesystem::exists(c.population_json)) {
        throw ConfigError("population_json does not exist: " +
                          c.population_json.string());
      }
      break;
    case PopulationSource::kSynth:
      break;
  }
  if (c.clients == 0) throw ConfigError("clients must be at least 1");
  if (c.synth.samples.low > c.synth.samples.high) {
    throw ConfigError("samples_min exceeds samples_max");
  }
  c.model();  // validates size and FLOP count
  if (c.clients_per_round == 0) throw ConfigError("clients_per_round must be at least 1");
  if (c.k && *c.k == 0) throw ConfigError("k must be at least 1");
  if (c.k && c.auto_k.value_or(false)) {
    throw ConfigError("k and auto_k are mutually exclusive");
  }
  if (c.fedcs_overselect && *c.fedcs_overselect < c.clients_per_round) {
    throw ConfigError("fedcs_overselect must be at least clients_per_round");
  }
  if (use == ConfigUse::kSinglePolicy) {
    if (c.policy != PolicyKind::kFedSS && (c.k || c.auto_k)) {
      throw ConfigError(std::string("k/auto_k only apply to policy fedss, not ") +
                        std::string(PolicyName(c.policy)));
    }
    if (c.policy != PolicyKind::kFedCS && c.fedcs_overselect) {
      throw ConfigError(std::string("fedcs_overselect only applies to policy fedcs, not ") +
                        std::string(PolicyName(c.policy)));
    }
  }
  if (c.k_min == 0) throw ConfigError("k_min must be at least 1");
  if (c.k_max != 0 && c.k_max < c.k_min) throw ConfigError("k_max is below k_min");
  if (c.knee_rounds == 0) throw ConfigError("knee_rounds must be at least 1");
  if (!(c.sensitivity > 0.0)) throw ConfigError("sensitivity must be positive");
  if (c.train.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (c.train.learning_rate < 0.0) throw ConfigError("learning_rate must be non-negative");
  if (c.data.classes < 2) throw ConfigError("classes must be at least 2");
  if (c.data.features == 0) throw ConfigError("features must be at least 1");
  if (!(c.data.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(c.data.holdout_fraction >= 0.0 && c.data.holdout_fraction < 1.0)) {
    throw ConfigError("holdout_fraction must be in [0, 1)");
  }
  if (c.out.empty()) throw ConfigError("out must name a directory");
}

nlohmann::json ConfigToJson(const RunConfig& c) {
  nlohmann::json doc;
  doc["population_source"] = SourceName(c.population_source);
  doc["device_table"] = c.device_table.string();
  doc["bandwidth_table"] = c.bandwidth_table.string();
  doc["population_json"] = c.population_json.string();
  doc["clients"] = c.clients;
  doc["samples_min"] = c.synth.samples.low;
  doc["samples_max"] = c.synth.samples.high;
  doc["synth_flops_min"] = c.synth.flops_rate.low;
  doc["synth_flops_max"] = c.synth.flops_rate.high;
  doc["synth_uplink_min"] = c.synth.uplink_bps.low;
  doc["synth_uplink_max"] = c.synth.uplink_bps.high;
  doc["synth_downlink_min"] = c.synth.downlink_bps.low;
  doc["synth_downlink_max"] = c.synth.downlink_bps.high;
  doc["model_size_bits"] = c.model_size_bits;
  doc["flops_per_sample"] = c.flops_per_sample;
  doc["policy"] = PolicyName(c.policy);
  doc["clients_per_round"] = c.clients_per_round;
  doc["fedcs_overselect"] = c.overselect();
  doc["k"] = c.k ? nlohmann::json(*c.k) : nlohmann::json(nullptr);
  doc["auto_k"] = !c.k;
  doc["rounds"] = c.rounds;
  doc["seed"] = c.seed;
  doc["k_min"] = c.k_min;
  doc["k_max"] = c.k_max;
  doc["knee_rounds"] = c.knee_rounds;
  doc["sensitivity"] = c.sensitivity;
  doc["epochs"] = c.train.epochs;
  doc["learning_rate"] = c.train.learning_rate;
  doc["batch_size"] = c.train.batch_size;
  doc["eval_every"] = c.train.eval_every;
  doc["classes"] = c.data.classes;
  doc["features"] = c.data.features;
  doc["alpha"] = c.data.alpha;
  doc["class_separation"] = c.data.class_separation;
  doc["noise"] = c.data.noise;
  doc["holdout_fraction"] = c.data.holdout_fraction;
  doc["speed_correlated_labels"] = c.data.speed_correlated;
  doc["correlation_width"] = c.data.correlation_width;
  doc["compare_training"] = c.compare_training;
  doc["threads"] = c.threads;
  doc["out"] = c.out.string();
  return doc;
}

}  // namespace fedss
