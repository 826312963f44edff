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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "fedss/csv.h"
#include "fedss/device_model.h"
#include "fedss/errors.h"
#include "test_support.h"

namespace fedss {
namespace {

namespace fs = std::filesystem;

fs::path TempFile(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "fedss_device_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << body;
  return path;
}

ClientProfile Profile(std::uint32_t id, double up, double down, double flops,
                      std::uint64_t samples) {
  return ClientProfile{ClientId{id}, up, down, flops, samples};
}

TEST_CASE("round time hand-evaluated cases") {
  // 1e8/1e7 + 5*2e9/1e9 + 1e8/5e7
  CHECK(EstimateRoundTime(Profile(0, 1e7, 5e7, 1e9, 5), GlobalModelSpec(1e8, 2e9)) ==
        doctest::Approx(22.0).epsilon(1e-15));
  // no samples: 8e6/1e6 twice
  CHECK(EstimateRoundTime(Profile(0, 1e6, 1e6, 1e9, 0), GlobalModelSpec(8e6, 1e9)) ==
        16.0);
}

TEST_CASE("doubling every rate halves the round time") {
  const GlobalModelSpec model(3.3e7, 1.7e9);
  const ClientProfile c = Profile(0, 2.9e6, 1.3e7, 7.1e9, 257);
  const ClientProfile d = Profile(0, 5.8e6, 2.6e7, 14.2e9, 257);
  CHECK(EstimateRoundTime(d, model) == EstimateRoundTime(c, model) / 2);
}

TEST_CASE("round time is strictly monotone in each rate") {
  const GlobalModelSpec model(1e8, 2e9);
  const ClientProfile base = Profile(0, 1e7, 5e7, 1e10, 200);
  const double t = EstimateRoundTime(base, model);
  ClientProfile c = base;
  c.uplink_bps *= 2;
  CHECK(EstimateRoundTime(c, model) < t);
  c = base;
  c.downlink_bps *= 2;
  CHECK(EstimateRoundTime(c, model) < t);
  c = base;
  c.flops_rate *= 2;
  CHECK(EstimateRoundTime(c, model) < t);
  c = base;
  c.num_samples += 1;
  CHECK(EstimateRoundTime(c, model) > t);
}

TEST_CASE("model spec and client validation") {
  CHECK_THROWS_AS(GlobalModelSpec(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(GlobalModelSpec(1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(GlobalModelSpec(NAN, 1.0), ConfigError);
  CHECK_THROWS_AS(Validate(Profile(0, 0.0, 1.0, 1.0, 1)), ConfigError);
  CHECK_THROWS_AS(Validate(Profile(0, 1.0, -2.0, 1.0, 1)), ConfigError);
  CHECK_THROWS_AS(Validate(Profile(0, 1.0, 1.0, INFINITY, 1)), ConfigError);
  CHECK_NOTHROW(Validate(Profile(0, 1.0, 1.0, 1.0, 0)));
}

TEST_CASE("population rejects empty, duplicate and invalid clients") {
  const GlobalModelSpec model(1.0, 1.0);
  CHECK_THROWS_AS(Population({}, model), ConfigError);
  CHECK_THROWS_AS(Population({Profile(3, 1, 1, 1, 1), Profile(3, 1, 1, 1, 1)},
                             model),
                  ConfigError);
  CHECK_THROWS_AS(Population({Profile(0, 1, 1, 0, 1)}, model), ConfigError);
}

TEST_CASE("population caches round times and orders ids") {
  const GlobalModelSpec model(1.0, 1.0);
  // times: id 7 -> 5, id 2 -> 3, id 9 -> 3 (plus 2 negligible transfer terms)
  Population pop({Profile(7, 1e300, 1e300, 1.0, 5), Profile(2, 1e300, 1e300, 1.0, 3),
                  Profile(9, 1e300, 1e300, 1.0, 3)},
                 model);
  REQUIRE(pop.size() == 3);
  CHECK(pop.round_time(ClientId{7}) == 5.0);
  CHECK(pop.index_of(ClientId{2}) == 1);
  CHECK_THROWS_AS(pop.index_of(ClientId{4}), ConfigError);
  const auto ids = pop.ids();
  CHECK(ids == std::vector<ClientId>{{2}, {7}, {9}});
  const auto by_time = pop.ids_by_round_time();
  CHECK(by_time == std::vector<ClientId>{{2}, {9}, {7}});
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(pop.round_times()[i] == EstimateRoundTime(pop.clients()[i], model));
  }
}

TEST_CASE("fixture population loads with the expected units") {
  const Population pop = LoadPopulation(testing::DeviceTable(),
                                        testing::BandwidthTable(),
                                        testing::DefaultModel(), 50, 11);
  REQUIRE(pop.size() == 50);
  std::set<double> flops;
  for (const auto& c : pop.clients()) {
    // gflops column scaled to FLOP/s, Mbps to bit/s
    CHECK(c.flops_rate >= 1e9);
    CHECK(c.uplink_bps >= 1e6);
    CHECK(c.num_samples >= 100);
    CHECK(c.num_samples <= 400);
    flops.insert(c.flops_rate);
  }
  CHECK(flops.size() > 5);
  CHECK(flops.count(3.4e9) + flops.count(57e9) <= 2);
  CHECK(pop.ids().front().value == 0);
  CHECK(pop.ids().back().value == 49);
}

TEST_CASE("loading is deterministic in the seed") {
  auto load = [](std::uint64_t seed) {
    return LoadPopulation(testing::DeviceTable(), testing::BandwidthTable(),
                          testing::DefaultModel(), 20, seed);
  };
  const Population a = load(5), b = load(5), c = load(6);
  CHECK(std::vector<double>(a.round_times().begin(), a.round_times().end()) ==
        std::vector<double>(b.round_times().begin(), b.round_times().end()));
  CHECK(std::vector<double>(a.round_times().begin(), a.round_times().end()) !=
        std::vector<double>(c.round_times().begin(), c.round_times().end()));
}

TEST_CASE("single-row tables give identical clients apart from id and samples") {
  const fs::path dev = TempFile("one_device.csv", "device,gflops\nonly,12\n");
  const fs::path bw = TempFile("one_region.csv",
                               "region,download_mbps,upload_mbps\nr,40,10\n");
  const Population pop = LoadPopulation(dev, bw, testing::DefaultModel(), 6, 2);
  for (const auto& c : pop.clients()) {
    CHECK(c.flops_rate == 12e9);
    CHECK(c.downlink_bps == 40e6);
    CHECK(c.uplink_bps == 10e6);
  }
}

TEST_CASE("bundled fixture round times are positive and finite") {
  const Population pop = testing::DefaultFixture();
  REQUIRE(pop.size() == 20);
  for (double t : pop.round_times()) {
    CHECK(std::isfinite(t));
    CHECK(t > 0.0);
  }
}

TEST_CASE("malformed device table names file, line and column") {
  const fs::path bad = TempFile("bad_devices.csv",
                                "device,gflops\nphone_a,12.5\nphone_b,abc\n");
  try {
    LoadPopulation(bad, testing::BandwidthTable(), testing::DefaultModel(), 4, 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.file() == bad.string());
    CHECK(e.line() == 3);
    CHECK(e.column() == 9);
    CHECK(std::string(e.what()).find(bad.string() + ":3:9") == 0);
  }
}

TEST_CASE("negative or zero rates are parse errors") {
  const fs::path bad = TempFile("neg_bw.csv",
                                "region,download_mbps,upload_mbps\nr1,10,-1\n");
  CHECK_THROWS_AS(LoadPopulation(testing::DeviceTable(), bad,
                                 testing::DefaultModel(), 4, 1),
                  ParseError);
}

TEST_CASE("header-only table is empty input") {
  const fs::path empty = TempFile("empty_devices.csv", "device,gflops\n");
  try {
    LoadPopulation(empty, testing::BandwidthTable(), testing::DefaultModel(), 4, 1);
    FAIL("expected EmptyTableError");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kEmptyInput);
  }
}

TEST_CASE("missing table is an io error") {
  CHECK_THROWS_AS(LoadPopulation("/nonexistent/devices.csv",
                                 testing::BandwidthTable(),
                                 testing::DefaultModel(), 4, 1),
                  IoError);
}

TEST_CASE("synthetic population stays inside its log-uniform ranges") {
  SynthSpec spec;
  const Population pop = SynthPopulation(spec, testing::DefaultModel(), 2000, 3);
  REQUIRE(pop.size() == 2000);
  double log_sum = 0.0;
  for (const auto& c : pop.clients()) {
    CHECK(c.flops_rate >= spec.flops_rate.low);
    CHECK(c.flops_rate <= spec.flops_rate.high);
    CHECK(c.uplink_bps >= spec.uplink_bps.low);
    CHECK(c.downlink_bps <= spec.downlink_bps.high);
    log_sum += std::log(c.flops_rate);
  }
  // mean of a log-uniform variable in log space is the midpoint
  const double mid = 0.5 * (std::log(spec.flops_rate.low) + std::log(spec.flops_rate.high));
  CHECK(log_sum / 2000.0 == doctest::Approx(mid).epsilon(0.01));
  SynthSpec bad;
  bad.uplink_bps = {5.0, 1.0};
  CHECK_THROWS_AS(SynthPopulation(bad, testing::DefaultModel(), 4, 1), ConfigError);
}

TEST_CASE("degenerate synthetic ranges give a homogeneous population") {
  SynthSpec spec;
  spec.flops_rate = {1e10, 1e10};
  spec.uplink_bps = {1e7, 1e7};
  spec.downlink_bps = {2e7, 2e7};
  spec.samples = {200, 200};
  const Population pop = SynthPopulation(spec, testing::DefaultModel(), 30, 4);
  for (double t : pop.round_times()) CHECK(t == pop.round_times()[0]);
}

TEST_CASE("large synthetic population has unique ids and spread") {
  const Population pop = SynthPopulation({}, testing::DefaultModel(), 10000, 9);
  std::set<std::uint32_t> ids;
  for (const auto& c : pop.clients()) ids.insert(c.id.value);
  CHECK(ids.size() == 10000);
  const auto [lo, hi] = std::minmax_element(pop.round_times().begin(),
                                            pop.round_times().end());
  CHECK(*hi / *lo > 1.0);
}

TEST_CASE("population json round trip") {
  const Population pop = testing::DefaultFixture();
  const auto doc = PopulationToJson(pop);
  CHECK(doc["units"]["uplink"] == "bit/s");
  const Population back = PopulationFromJson(doc);
  REQUIRE(back.size() == pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    CHECK(back.round_times()[i] == pop.round_times()[i]);
  }
  auto wrong = doc;
  wrong["units"]["uplink"] = "Mbps";
  CHECK_THROWS_AS(PopulationFromJson(wrong), ConfigError);
}

}  // namespace
}  // namespace fedss
