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

#include "fedss/app.h"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "fedss/csv.h"
#include "fedss/errors.h"
#include "fedss/orchestrator.h"
#include "fedss/rng.h"
#include "fedss/simulator.h"
#include "fedss/trainer.h"

namespace fedss::app {
namespace {

std::ofstream OpenOutput(const RunConfig& config, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) throw IoError("cannot create " + config.out.string() + ": " + ec.message());
  const auto path = config.out / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void WriteJson(const RunConfig& config, const std::string& name,
               nlohmann::json body) {
  body["config"] = ConfigToJson(config);
  auto out = OpenOutput(config, name);
  out << body.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + (config.out / name).string());
}

nlohmann::json KneeToJson(const OptimalK& knee) {
  nlohmann::json doc;
  auto& points = doc["curve"] = nlohmann::json::array();
  for (const auto& p : knee.curve.points) {
    points.push_back({{"k", p.k}, {"x", p.x}, {"y", p.y}});
  }
  doc["skipped_k"] = knee.curve.skipped;
  doc["knee_x"] = knee.knee_x ? nlohmann::json(*knee.knee_x) : nlohmann::json(nullptr);
  doc["optimal_k"] = knee.k;
  doc["from_knee"] = knee.from_knee;
  return doc;
}

void WriteRoundsCsv(std::ostream& out, const SimulationReport& report) {
  csv::Writer w(out, {"round", "policy", "duration", "cluster"});
  for (const auto& r : report.records) {
    w << r.round_index << PolicyName(r.policy) << r.duration;
    if (r.cluster_index) {
      w << *r.cluster_index;
    } else {
      w << std::string_view{};
    }
    w.EndRow();
  }
}

void WriteCdfCsv(std::ostream& out, const SimulationReport& report) {
  csv::Writer w(out, {"duration", "fraction"});
  for (const auto& [d, f] : RoundDurationCdf(report)) {
    w << d << f;
    w.EndRow();
  }
}

nlohmann::json FairnessToJson(const FairnessSummary& f) {
  nlohmann::json doc;
  auto rates = [](const std::map<std::uint32_t, double>& m) {
    auto arr = nlohmann::json::array();
    for (const auto& [id, v] : m) arr.push_back({{"id", id}, {"rate", v}});
    return arr;
  };
  doc["selection_rate"] = rates(f.selection_rate);
  doc["aggregation_rate"] = rates(f.aggregation_rate);
  doc["gini"] = f.gini;
  auto ids = nlohmann::json::array();
  for (ClientId id : f.slow_quartile) ids.push_back(id.value);
  doc["slow_quartile"] = ids;
  doc["slow_quartile_share"] = f.slow_quartile_share;
  return doc;
}

struct PolicyRun {
  PolicyKind kind;
  SimulationReport report;
  std::optional<EvalReport> eval;
  std::vector<RoundMetrics> curve;
};

PolicyRun Train(const RunConfig& config, const Population& population,
                const std::vector<ClientDataset>& data, const PolicyConfig& policy,
                Coordinator& coordinator) {
  TrainResult result = FederatedTrain(population, data, policy, config.rounds,
                                      config.train, SplitSeeds(config.seed).training,
                                      coordinator);
  PolicyRun run{policy.kind, std::move(result.report), std::nullopt,
                std::move(result.curve)};
  run.eval = EvaluatePerClient(result.model, data, population);
  return run;
}

void WriteAccuracyCsv(std::ostream& out, const std::vector<PolicyRun>& runs) {
  csv::Writer w(out, {"round", "policy", "global_accuracy", "global_loss"});
  for (const auto& run : runs) {
    for (const auto& m : run.curve) {
      w << m.round << PolicyName(run.kind) << m.accuracy << m.loss;
      w.EndRow();
    }
  }
}

}  // namespace

Seeds SplitSeeds(std::uint64_t root) {
  return {DeriveSeed(root, "population"), DeriveSeed(root, "policy"),
          DeriveSeed(root, "data"), DeriveSeed(root, "training"),
          DeriveSeed(root, "sweep")};
}

Population BuildPopulation(const RunConfig& config) {
  const std::uint64_t seed = SplitSeeds(config.seed).population;
  switch (config.population_source) {
    case PopulationSource::kFixture:
      return LoadPopulation(config.device_table, config.bandwidth_table,
                            config.model(), config.clients, seed,
                            config.synth.samples);
    case PopulationSource::kSynth:
      return SynthPopulation(config.synth, config.model(), config.clients, seed);
    case PopulationSource::kJson:
      return PopulationFromJson(LoadJsonFile(config.population_json));
  }
  throw ConfigError("unknown population source");
}

SweepOptions SweepOptionsFor(const RunConfig& config, const Population& population) {
  SweepOptions o;
  o.k_min = config.k_min;
  o.k_max = config.k_max != 0
                ? config.k_max
                : DefaultMaxK(population.size(), config.clients_per_round);
  o.k_max = std::max(o.k_max, o.k_min);
  o.rounds = config.knee_rounds;
  o.clients_per_round = config.clients_per_round;
  o.seed = SplitSeeds(config.seed).sweep;
  return o;
}

FedSSClusters ResolveClusters(const RunConfig& config, const Population& population) {
  if (config.k) return {ClusterByRoundTime(population, *config.k), std::nullopt};
  OptimalK knee = FindOptimalK(population, SweepOptionsFor(config, population),
                               config.sensitivity);
  ClusterSet clusters = ClusterByRoundTime(population, knee.k);
  return {std::move(clusters), std::move(knee)};
}

PolicyConfig MakePolicy(const RunConfig& config, PolicyKind kind,
                        const std::optional<ClusterSet>& clusters) {
  PolicyConfig p;
  p.kind = kind;
  p.clients_per_round = config.clients_per_round;
  p.fedcs_overselect = config.overselect();
  if (kind == PolicyKind::kFedSS) p.clusters = clusters;
  p.seed = SplitSeeds(config.seed).policy;
  return p;
}

void RunCluster(const RunConfig& config, std::ostream& log) {
  const Population population = BuildPopulation(config);
  const FedSSClusters resolved = ResolveClusters(config, population);
  nlohmann::json body;
  body["clusters"] = ClusterSetToJson(resolved.clusters);
  if (resolved.knee) body["knee"] = KneeToJson(*resolved.knee);
  WriteJson(config, "report.json", std::move(body));
  WriteJson(config, "population.json", PopulationToJson(population));

  log << "k=" << resolved.clusters.k()
      << " k_anonymity=" << KAnonymity(resolved.clusters) << '\n';
  for (std::size_t j = 0; j < resolved.clusters.k(); ++j) {
    const auto& c = resolved.clusters.clusters[j];
    log << "cluster " << j << ": size=" << c.members.size()
        << " centroid_s=" << csv::FormatNumber(c.centroid) << '\n';
  }
}

void RunKnee(const RunConfig& config, std::ostream& log) {
  const Population population = BuildPopulation(config);
  const OptimalK knee = FindOptimalK(population, SweepOptionsFor(config, population),
                                     config.sensitivity);
  {
    auto out = OpenOutput(config, "curve.csv");
    csv::Writer w(out, {"k", "x", "y"});
    for (const auto& p : knee.curve.points) {
      w << p.k << p.x << p.y;
      w.EndRow();
    }
  }
  WriteJson(config, "report.json", KneeToJson(knee));
  for (std::size_t k : knee.curve.skipped) {
    log << "warning: skipped k=" << k << " (a cluster has fewer than "
        << config.clients_per_round << " clients)\n";
  }
  log << "optimal_k=" << knee.k
      << (knee.from_knee ? " (knee)" : " (fallback: within 5% of minimum)") << '\n';
}

void RunSimulate(const RunConfig& config, std::ostream& log) {
  const Population population = BuildPopulation(config);
  std::optional<ClusterSet> clusters;
  if (config.policy == PolicyKind::kFedSS) {
    clusters = ResolveClusters(config, population).clusters;
  }
  const PolicyConfig policy = MakePolicy(config, config.policy, clusters);
  const SimulationReport report = Simulate(population, policy, config.rounds);

  nlohmann::json body;
  body["report"] = ReportToJson(report);
  body["fairness"] = FairnessToJson(Fairness(report, population));
  WriteJson(config, "report.json", std::move(body));
  {
    auto out = OpenOutput(config, "rounds.csv");
    WriteRoundsCsv(out, report);
  }
  {
    auto out = OpenOutput(config, "cdf.csv");
    WriteCdfCsv(out, report);
  }
  log << PolicyName(report.policy) << ": rounds=" << report.records.size()
      << " total_time_s=" << csv::FormatNumber(report.total_time)
      << " p50_s=" << csv::FormatNumber(report.quantiles.p50)
      << " p90_s=" << csv::FormatNumber(report.quantiles.p90) << '\n';
}

void RunTrain(const RunConfig& config, std::ostream& log) {
  const Population population = BuildPopulation(config);
  std::optional<ClusterSet> clusters;
  if (config.policy == PolicyKind::kFedSS) {
    clusters = ResolveClusters(config, population).clusters;
  }
  const auto data = GenerateNonIidData(population, config.data,
                                       SplitSeeds(config.seed).data);
  Coordinator coordinator(config.threads);
  const PolicyRun run = Train(config, population, data,
                              MakePolicy(config, config.policy, clusters),
                              coordinator);

  WriteJson(config, "eval.json", {{"policy", PolicyName(run.kind)},
                                  {"eval", EvalToJson(*run.eval)}});
  WriteJson(config, "report.json", {{"report", ReportToJson(run.report)}});
  {
    auto out = OpenOutput(config, "accuracy_by_round.csv");
    WriteAccuracyCsv(out, {run});
  }
  log << PolicyName(run.kind)
      << ": global_accuracy=" << csv::FormatNumber(run.eval->global_accuracy)
      << " slow_accuracy=" << csv::FormatNumber(run.eval->slow_accuracy)
      << " fast_accuracy=" << csv::FormatNumber(run.eval->fast_accuracy)
      << " total_time_s=" << csv::FormatNumber(run.report.total_time) << '\n';
}

void RunCompare(const RunConfig& config, std::ostream& log) {
  const Population population = BuildPopulation(config);
  const FedSSClusters resolved = ResolveClusters(config, population);
  const std::vector<PolicyKind> kinds = {PolicyKind::kFedCS, PolicyKind::kFedSS,
                                         PolicyKind::kRandom};

  std::vector<PolicyRun> runs;
  if (config.compare_training) {
    const auto data = GenerateNonIidData(population, config.data,
                                         SplitSeeds(config.seed).data);
    Coordinator coordinator(config.threads);
    for (PolicyKind kind : kinds) {
      runs.push_back(Train(config, population, data,
                           MakePolicy(config, kind, resolved.clusters), coordinator));
    }
  } else {
    for (PolicyKind kind : kinds) {
      runs.push_back({kind,
                      Simulate(population, MakePolicy(config, kind, resolved.clusters),
                               config.rounds),
                      std::nullopt,
                      {}});
    }
  }

  nlohmann::json body;
  body["fedss_clusters"] = ClusterSetToJson(resolved.clusters);
  if (resolved.knee) body["knee"] = KneeToJson(*resolved.knee);
  auto& policies = body["policies"] = nlohmann::json::object();

  std::vector<std::string> header = {"policy", "total_time_s", "p50_s", "p90_s",
                                     "slow_quartile_share"};
  if (config.compare_training) {
    for (const char* h : {"global_accuracy", "slow_accuracy", "fast_accuracy",
                          "slow_weighted_f1", "fast_weighted_f1"}) {
      header.emplace_back(h);
    }
  }
  auto summary_out = OpenOutput(config, "summary.csv");
  csv::Writer summary(summary_out, header);

  log << std::left << std::setw(8) << "policy" << std::right << std::setw(16)
      << "total_time_s" << std::setw(12) << "p50_s" << std::setw(12) << "p90_s"
      << std::setw(12) << "slow_share";
  if (config.compare_training) log << std::setw(10) << "slow_acc" << std::setw(10) << "fast_acc";
  log << '\n';

  for (const auto& run : runs) {
    const FairnessSummary fairness = Fairness(run.report, population);
    nlohmann::json entry;
    entry["report"] = ReportToJson(run.report);
    entry["fairness"] = FairnessToJson(fairness);
    if (run.eval) entry["eval"] = EvalToJson(*run.eval);
    policies[std::string(PolicyName(run.kind))] = std::move(entry);

    summary << PolicyName(run.kind) << run.report.total_time
            << run.report.quantiles.p50 << run.report.quantiles.p90
            << fairness.slow_quartile_share;
    if (run.eval) {
      summary << run.eval->global_accuracy << run.eval->slow_accuracy
              << run.eval->fast_accuracy << run.eval->slow_f1 << run.eval->fast_f1;
    }
    summary.EndRow();

    log << std::left << std::setw(8) << PolicyName(run.kind) << std::right
        << std::fixed << std::setprecision(1) << std::setw(16) << run.report.total_time
        << std::setw(12) << run.report.quantiles.p50 << std::setw(12)
        << run.report.quantiles.p90 << std::setprecision(4) << std::setw(12)
        << fairness.slow_quartile_share;
    if (run.eval) {
      log << std::setw(10) << run.eval->slow_accuracy << std::setw(10)
          << run.eval->fast_accuracy;
    }
    log << std::defaultfloat << '\n';
  }
  WriteJson(config, "report.json", std::move(body));
  if (config.compare_training) {
    auto out = OpenOutput(config, "accuracy_by_round.csv");
    WriteAccuracyCsv(out, runs);
  }
}

}  // namespace fedss::app
