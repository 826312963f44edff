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

// Acceptance checks. Usage: fedss_acceptance [criterion ...]
// Prints one PASS/FAIL line per criterion and exits non-zero if any failed.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "fedss/app.h"
#include "fedss/clustering.h"
#include "fedss/config.h"
#include "fedss/knee.h"
#include "fedss/orchestrator.h"
#include "fedss/simulator.h"
#include "fedss/trainer.h"
#include "test_support.h"

namespace fedss {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

RunConfig Config(const json& overrides) {
  return ParseConfig(json::object(), overrides, ConfigUse::kAllPolicies,
                     testing::DataDir());
}

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "fedss_acceptance" / name;
  fs::remove_all(p);
  return p;
}

// 1. Round-time formula against an extended-precision hand evaluation.
Outcome FormulaFidelity() {
  std::mt19937_64 rng(20260101);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double m = log_uniform(1e5, 1e10);
    const double f = log_uniform(1e6, 1e11);
    ClientProfile c{ClientId{0}, log_uniform(1e5, 1e9), log_uniform(1e5, 1e9),
                    log_uniform(1e8, 1e12), std::uniform_int_distribution<std::uint64_t>(0, 5000)(rng)};
    const long double expect = static_cast<long double>(m) / c.uplink_bps +
                               static_cast<long double>(c.num_samples) * f / c.flops_rate +
                               static_cast<long double>(m) / c.downlink_bps;
    const double got = EstimateRoundTime(c, GlobalModelSpec(m, f));
    worst = std::max(worst, static_cast<double>(std::abs((got - expect) / expect)));
  }
  return {worst < 1e-12, "max relative error " + Fmt(worst, 3)};
}

// 2. Property suite over random populations.
Outcome ClusteringInvariants() {
  std::mt19937_64 rng(77);
  const int populations = 1000;
  int violations = 0;
  for (int trial = 0; trial < populations; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(8, 500)(rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const Population pop = SynthPopulation({}, testing::DefaultModel(), n, rng());
    const ClusterSet cs = ClusterByRoundTime(pop, k);

    std::vector<std::uint32_t> seen;
    std::vector<ClientId> concat;
    for (const auto& c : cs.clusters) {
      for (const auto& m : c.members) {
        seen.push_back(m.id.value);
        concat.push_back(m.id);
      }
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    const bool partition = cs.k() == k && seen == all;
    const bool spread = cs.max_size() - cs.min_size() <= 1;
    const bool contiguous = concat == pop.ids_by_round_time();

    std::vector<double> scaled(pop.round_times().begin(), pop.round_times().end());
    const double factor = std::exp(std::uniform_real_distribution<double>(-6, 6)(rng));
    for (auto& t : scaled) t *= factor;
    const ClusterSet again = ClusterByRoundTime(SortedByTime(scaled), k);
    bool equivariant = again.k() == k;
    for (std::size_t j = 0; equivariant && j < k; ++j) {
      const auto& a = cs.clusters[j].members;
      const auto& b = again.clusters[j].members;
      equivariant = a.size() == b.size();
      // SortedByTime(span) numbers clients by position, which equals the id
      for (std::size_t i = 0; equivariant && i < a.size(); ++i) {
        equivariant = a[i].id == b[i].id;
      }
    }
    violations += !(partition && spread && contiguous && equivariant);
  }
  return {violations == 0, std::to_string(populations) + " populations, " +
                               std::to_string(violations) + " violations"};
}

// 3. Percentile positions for k=3.
Outcome PercentileAnchor() {
  const auto levels = PercentileLevels(3);
  const bool exact = levels == std::vector<double>{25.0, 50.0, 75.0};
  const auto c = PercentileCentroids(std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, 3);
  const bool values = c == std::vector<double>{2.75, 4.5, 6.25};
  return {exact && values, "levels (" + Fmt(levels[0]) + ", " + Fmt(levels[1]) + ", " +
                               Fmt(levels[2]) + ")"};
}

// 4. Kneedle against the curvature maximum, and no knee on lines.
Outcome KneedleCorrectness() {
  std::vector<double> x, y;
  for (int i = 1; i <= 100; ++i) {
    x.push_back(0.1 * i);
    y.push_back(-1.0 / x.back() + 5.0);
  }
  std::size_t best = 1;
  double best_kappa = -1.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    const double d1 = (y[i + 1] - y[i - 1]) / (2 * h);
    const double d2 = (y[i + 1] - 2 * y[i] + y[i - 1]) / (h * h);
    const double kappa = std::abs(d2) / std::pow(1 + d1 * d1, 1.5);
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best = i;
    }
  }
  const auto knee = Kneedle(x, y);
  std::vector<double> lx, ly, ld;
  for (int i = 1; i <= 10; ++i) {
    lx.push_back(i);
    ly.push_back(i);
    ld.push_back(20.0 - 3.0 * i);
  }
  const bool lines = !Kneedle(lx, ly) && !Kneedle(lx, ld);
  const bool near = knee && std::abs(*knee - x[best]) <= 0.2;
  return {near && lines, "knee " + (knee ? Fmt(*knee) : std::string("none")) +
                             ", curvature oracle " + Fmt(x[best]) +
                             (lines ? ", lines have no knee" : ", a line has a knee")};
}

// 5. FedSS clustering against KMeans on a large synthetic population.
Outcome ClusteringVsKMeans() {
  const std::size_t clients_per_round = 5, rounds = 1000;
  const std::uint64_t seed = 5;
  const Population pop = SynthPopulation({}, testing::DefaultModel(), 10000, 2024);
  const auto sorted = SortedByTime(pop);
  std::size_t feasible = 0;
  bool ok = true;
  std::string detail;
  for (std::size_t k = 2; k <= 8; ++k) {
    const ClusterSet fedss = ClusterByRoundTime(sorted, k);
    const ClusterSet kmeans = KMeans1D(sorted, k).clusters;
    if (fedss.min_size() < clients_per_round || kmeans.min_size() < clients_per_round) {
      detail += " k=" + std::to_string(k) + ":infeasible";
      continue;
    }
    ++feasible;
    const double a = AverageRoundTime(pop, fedss, rounds, clients_per_round, seed);
    const double b = AverageRoundTime(pop, kmeans, rounds, clients_per_round, seed);
    ok &= a <= b;
    detail += " k=" + std::to_string(k) + ":" + Fmt(a) + "/" + Fmt(b);
  }
  return {ok && feasible > 0,
          std::to_string(feasible) + " feasible k, fedss/kmeans avg s:" + detail};
}

struct PolicyTotals {
  SimulationReport fedcs, fedss, random;
};

// The default fixture and its automatically chosen clusters; the root seed
// only changes the policy stream.
PolicyTotals RunFixture(std::uint64_t root_seed, std::size_t rounds) {
  const RunConfig defaults = Config(json::object());
  const RunConfig config = Config(json{{"seed", root_seed}, {"rounds", rounds}});
  const Population pop = app::BuildPopulation(defaults);
  const auto clusters = app::ResolveClusters(defaults, pop).clusters;
  return {Simulate(pop, app::MakePolicy(config, PolicyKind::kFedCS, clusters), rounds),
          Simulate(pop, app::MakePolicy(config, PolicyKind::kFedSS, clusters), rounds),
          Simulate(pop, app::MakePolicy(config, PolicyKind::kRandom, clusters), rounds)};
}

// 6. Total time ordering on the fixture.
Outcome PolicyOrdering() {
  const PolicyTotals t = RunFixture(1, 2800);
  const double cs = t.fedcs.total_time, ss = t.fedss.total_time, rnd = t.random.total_time;
  const bool ok = cs < ss && ss < rnd && ss <= 0.9 * rnd;
  return {ok, "fedcs " + Fmt(cs, 7) + " s, fedss " + Fmt(ss, 7) + " s, random " +
                  Fmt(rnd, 7) + " s, fedss/random " + Fmt(ss / rnd, 3)};
}

// 7. Share of FedSS rounds faster than the Random median.
Outcome CdfProperty() {
  const PolicyTotals t = RunFixture(1, 2800);
  const double median = t.random.quantiles.p50;
  std::size_t below = 0;
  for (const auto& r : t.fedss.records) below += r.duration < median;
  const double share = static_cast<double>(below) / t.fedss.records.size();
  return {share >= 0.80, "fraction below random median (" + Fmt(median) + " s) = " +
                             Fmt(share, 4) + ", need >= 0.8"};
}

// 8. Aggregation fairness over long runs.
Outcome AggregationFairness() {
  const std::size_t rounds = 10000, seeds = 5;
  const Population pop = testing::DefaultFixture();
  std::map<std::uint32_t, double> mean_counts;
  double worst_dev = 0.0, worst_share = 0.0;
  for (std::uint64_t s = 1; s <= seeds; ++s) {
    const PolicyTotals t = RunFixture(s, rounds);
    for (const auto& [id, c] : t.fedss.aggregation_counts) {
      mean_counts[id] += static_cast<double>(c) / seeds;
    }
    worst_share = std::max(worst_share, SlowestAggregationShare(t.fedcs, pop, 4));
  }
  const double fair = static_cast<double>(rounds) * 5 / pop.size();
  for (const auto& [id, c] : mean_counts) {
    worst_dev = std::max(worst_dev, std::abs(c - fair) / fair);
  }
  return {worst_dev <= 0.20 && worst_share < 0.05,
          "fedss worst deviation " + Fmt(worst_dev, 3) + " of R*K/N, fedcs slowest-4 share " +
              Fmt(worst_share, 3)};
}

// 9. Barrier and canonical ordering under stress.
Outcome BarrierStress() {
  const std::size_t k = 64, reps = 1000;
  Coordinator coordinator(16);
  std::mt19937_64 rng(9);
  std::size_t bad = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    std::vector<ClientId> ids(k);
    for (std::size_t i = 0; i < k; ++i) ids[i] = ClientId{static_cast<std::uint32_t>(i * 7 + rep % 3)};
    std::shuffle(ids.begin(), ids.end(), rng);
    std::vector<int> delay(k);
    for (auto& d : delay) d = static_cast<int>(rng() % 4);
    std::atomic<std::size_t> acked{0};
    const auto out = coordinator.DispatchRound<std::uint32_t>(ids, [&](ClientId id) {
      const int d = delay[id.value % k];
      if (d == 1) std::this_thread::yield();
      if (d == 2) std::this_thread::sleep_for(std::chrono::microseconds(20));
      acked.fetch_add(1);
      return WorkOutcome<std::uint32_t>{id.value, 0.0};
    });
    bool ok = out.size() == k && acked.load() == k;
    for (std::size_t i = 0; ok && i < k; ++i) {
      ok = out[i].value == out[i].client.value && (i == 0 || out[i - 1].client < out[i].client);
    }
    // raw barrier: k threads deliver concurrently, it must fire exactly once
    RoundBarrier<int> barrier(k);
    {
      std::vector<std::jthread> threads;
      for (std::size_t i = 0; i < k; ++i) {
        threads.emplace_back([&barrier, i] {
          barrier.Deliver(i, {WorkOutcome<int>{static_cast<int>(i), 0.0}, ""});
        });
      }
    }
    barrier.Wait();
    ok = ok && barrier.acked() == k && barrier.times_fired() == 1;
    bad += !ok;
  }
  return {bad == 0, std::to_string(reps) + " repetitions of K=64, " + std::to_string(bad) +
                        " with lost, duplicate or misordered results"};
}

// 10. Gradient and aggregation math.
Outcome TrainerMath() {
  GlobalModel model(3, 4);
  Rng rng = MakeRng(10);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& w : model.weights.data) w = 0.5 * n(rng);
  for (auto& b : model.bias) b = 0.5 * n(rng);
  Matrix x(10, 4);
  for (auto& v : x.data) v = n(rng);
  std::vector<std::uint32_t> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = static_cast<std::uint32_t>((i * 7) % 3);
  const ModelDelta g = SoftmaxGradient(model, x, y, {});
  const double h = 1e-5;
  double grad_err = 0.0;
  auto probe = [&](double& param, double analytic) {
    const double keep = param;
    param = keep + h;
    const double up = SoftmaxLoss(model, x, y, {});
    param = keep - h;
    const double down = SoftmaxLoss(model, x, y, {});
    param = keep;
    grad_err = std::max(grad_err, std::abs((up - down) / (2 * h) - analytic));
  };
  for (std::size_t i = 0; i < model.weights.data.size(); ++i) probe(model.weights.data[i], g.weights.data[i]);
  for (std::size_t c = 0; c < 3; ++c) probe(model.bias[c], g.bias[c]);

  double avg_err = 0.0;
  auto unit = [](std::size_t i) {
    ModelDelta d{Matrix(1, 3), std::vector<double>(1, 0.0)};
    d.weights(0, i) = 1.0;
    return d;
  };
  const GlobalModel zero(1, 3);
  const ModelDelta e1 = unit(0), e2 = unit(1), e3 = unit(2);
  const std::vector<WeightedDelta> three{{&e1, 1}, {&e2, 2}, {&e3, 3}};
  const GlobalModel w = FedAvgAggregate(zero, three);
  for (std::size_t i = 0; i < 3; ++i) {
    avg_err = std::max(avg_err, std::abs(w.weights(0, i) - (i + 1) / 6.0));
  }
  ModelDelta pos = e1, neg = e1;
  for (auto& v : neg.weights.data) v = -v;
  const std::vector<WeightedDelta> cancel{{&pos, 4}, {&neg, 4}};
  const GlobalModel cz = FedAvgAggregate(zero, cancel);
  for (double v : cz.weights.data) avg_err = std::max(avg_err, std::abs(v));
  const std::vector<WeightedDelta> single{{&e2, 9}};
  const GlobalModel s = FedAvgAggregate(zero, single);
  for (std::size_t i = 0; i < 3; ++i) {
    avg_err = std::max(avg_err, std::abs(s.weights(0, i) - e2.weights(0, i)));
  }
  return {grad_err < 1e-5 && avg_err <= 1e-12,
          "gradient max abs error " + Fmt(grad_err, 3) + ", fedavg max error " + Fmt(avg_err, 3)};
}

// 11. Accuracy of the slowest clients under each policy.
Outcome BiasDirection() {
  const int seeds = 5;
  std::map<std::string, double> acc, f1;
  for (int s = 1; s <= seeds; ++s) {
    RunConfig config = Config(json{{"seed", s},
                                   {"k", 4},
                                   {"rounds", 300},
                                   {"alpha", 0.3},
                                   {"speed_correlated_labels", true},
                                   {"compare_training", true},
                                   {"eval_every", 0}});
    config.out = Scratch("bias_" + std::to_string(s));
    std::ostringstream log;
    app::RunCompare(config, log);
    std::ifstream in(config.out / "report.json");
    const json report = json::parse(in);
    for (const char* p : {"fedcs", "fedss", "random"}) {
      acc[p] += report["policies"][p]["eval"]["slow_accuracy"].get<double>() / seeds;
      f1[p] += report["policies"][p]["eval"]["slow_weighted_f1"].get<double>() / seeds;
    }
  }
  const bool ok = acc["fedss"] - acc["fedcs"] >= 0.03 &&
                  std::abs(acc["fedss"] - acc["random"]) <= 0.02 &&
                  f1["fedss"] - f1["fedcs"] >= 0.03 &&
                  std::abs(f1["fedss"] - f1["random"]) <= 0.02;
  return {ok, "slow-4 accuracy fedcs " + Fmt(acc["fedcs"], 3) + " fedss " +
                  Fmt(acc["fedss"], 3) + " random " + Fmt(acc["random"], 3) +
                  "; weighted F1 fedcs " + Fmt(f1["fedcs"], 3) + " fedss " +
                  Fmt(f1["fedss"], 3) + " random " + Fmt(f1["random"], 3)};
}

std::map<std::string, std::string> ReadDir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

// 12. Byte-identical reruns of every subcommand.
Outcome Determinism() {
  using Runner = void (*)(const RunConfig&, std::ostream&);
  const std::vector<std::pair<std::string, Runner>> commands = {
      {"cluster", app::RunCluster}, {"knee", app::RunKnee},
      {"simulate", app::RunSimulate}, {"train", app::RunTrain},
      {"compare", app::RunCompare}};
  std::size_t files = 0;
  std::string differing;
  for (const auto& [name, run] : commands) {
    RunConfig config = Config(json{{"seed", 3},
                                   {"rounds", 60},
                                   {"knee_rounds", 300},
                                   {"compare_training", name == "compare"}});
    config.out = Scratch("determinism_" + name);
    std::ostringstream log;
    run(config, log);
    const auto first = ReadDir(config.out);
    run(config, log);
    const auto second = ReadDir(config.out);
    files += first.size();
    if (first != second || first.empty()) differing += " " + name;
  }
  return {differing.empty(), std::to_string(files) + " report files compared" +
                                 (differing.empty() ? "" : ", differing:" + differing)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace fedss

int main(int argc, char** argv) {
  using namespace fedss;
  const std::vector<Criterion> all = {
      {1, "formula fidelity", FormulaFidelity},
      {2, "clustering invariants", ClusteringInvariants},
      {3, "percentile anchor", PercentileAnchor},
      {4, "kneedle correctness", KneedleCorrectness},
      {5, "clustering vs kmeans", ClusteringVsKMeans},
      {6, "policy ordering", PolicyOrdering},
      {7, "cdf property", CdfProperty},
      {8, "fairness", AggregationFairness},
      {9, "barrier correctness", BarrierStress},
      {10, "trainer math", TrainerMath},
      {11, "bias direction", BiasDirection},
      {12, "determinism", Determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.number) == wanted.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << "criterion " << c.number << " [" << c.name << "]: "
              << (o.pass ? "PASS" : "FAIL") << " - " << o.detail << " ("
              << fedss::Fmt(secs, 3) << " s)" << std::endl;
  }
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
