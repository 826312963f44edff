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

#include "fedss/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

#include "fedss/errors.h"
#include "fedss/metrics.h"
#include "fedss/rng.h"

namespace fedss {
namespace {

void CheckSpec(const DataSpec& spec) {
  if (spec.classes < 2) throw ConfigError("need at least two classes");
  if (spec.features == 0) throw ConfigError("need at least one feature");
  if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) {
    throw ConfigError("dirichlet alpha must be positive");
  }
  if (!(spec.holdout_fraction >= 0.0 && spec.holdout_fraction < 1.0)) {
    throw ConfigError("holdout fraction must be in [0, 1)");
  }
  if (!(spec.noise >= 0.0) || !(spec.class_separation > 0.0)) {
    throw ConfigError("noise must be non-negative and separation positive");
  }
  if (spec.speed_correlated && !(spec.correlation_width > 0.0)) {
    throw ConfigError("correlation width must be positive");
  }
}

// Per-class concentration for one client.
std::vector<double> Concentration(const DataSpec& spec, double speed_rank) {
  std::vector<double> alpha(spec.classes, spec.alpha);
  if (!spec.speed_correlated) return alpha;
  const double last = static_cast<double>(spec.classes - 1);
  double sum = 0.0;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    const double offset = static_cast<double>(c) / last - speed_rank;
    alpha[c] = std::exp(-offset * offset /
                        (2.0 * spec.correlation_width * spec.correlation_width));
    sum += alpha[c];
  }
  for (auto& a : alpha) {
    a = spec.alpha * static_cast<double>(spec.classes) * a / sum;
  }
  return alpha;
}

std::vector<double> DrawDirichlet(std::span<const double> concentration,
                                  Rng& rng) {
  std::vector<double> p(concentration.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    std::gamma_distribution<double> gamma(concentration[c], 1.0);
    p[c] = gamma(rng);
    sum += p[c];
  }
  if (!(sum > 0.0)) {
    // Every draw underflowed: all mass on the most concentrated class.
    const auto top = std::max_element(concentration.begin(), concentration.end()) -
                     concentration.begin();
    std::fill(p.begin(), p.end(), 0.0);
    p[static_cast<std::size_t>(top)] = 1.0;
    return p;
  }
  for (auto& v : p) v /= sum;
  return p;
}

// Largest-remainder rounding of n * p.
std::vector<std::size_t> Apportion(std::span<const double> p, std::size_t n) {
  std::vector<std::size_t> counts(p.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double exact = p[c] * static_cast<double>(n);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++counts[remainders[i % remainders.size()].second];
  }
  return counts;
}

void Softmax(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : z) v /= sum;
}

void Logits(const GlobalModel& model, std::span<const double> x,
            std::span<double> out) {
  for (std::size_t c = 0; c < model.classes(); ++c) {
    double z = model.bias[c];
    const auto w = model.weights.row(c);
    for (std::size_t f = 0; f < x.size(); ++f) z += w[f] * x[f];
    out[c] = z;
  }
}

std::vector<std::size_t> AllRows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

ModelDelta ZeroDelta(std::size_t classes, std::size_t features) {
  return {Matrix(classes, features), std::vector<double>(classes, 0.0)};
}

}  // namespace

bool GlobalModel::finite() const {
  for (double v : weights.data) {
    if (!std::isfinite(v)) return false;
  }
  for (double v : bias) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<ClientDataset> GenerateNonIidData(
    std::span<const std::uint64_t> sample_counts,
    std::span<const double> speed_rank, const DataSpec& spec,
    std::uint64_t seed) {
  CheckSpec(spec);
  if (spec.speed_correlated && speed_rank.size() != sample_counts.size()) {
    throw ConfigError("speed-correlated labels need one speed rank per client");
  }

  // Class means are shared by every client.
  Rng mean_rng = MakeRng(DeriveSeed(seed, "class_means"));
  std::normal_distribution<double> mean_dist(0.0, spec.class_separation);
  Matrix means(spec.classes, spec.features);
  for (double& v : means.data) v = mean_dist(mean_rng);

  const std::uint64_t client_seed = DeriveSeed(seed, "clients");
  std::vector<ClientDataset> out;
  out.reserve(sample_counts.size());
  for (std::size_t i = 0; i < sample_counts.size(); ++i) {
    Rng rng = MakeRng(DeriveSeed(client_seed, static_cast<std::uint64_t>(i)));
    const double rank = spec.speed_correlated ? speed_rank[i] : 0.0;
    const auto concentration = Concentration(spec, rank);
    const auto proportions = DrawDirichlet(concentration, rng);
    const std::size_t n = sample_counts[i];

    ClientDataset d;
    d.id = ClientId{static_cast<std::uint32_t>(i)};
    d.histogram = Apportion(proportions, n);
    for (std::size_t c = 0; c < spec.classes; ++c) {
      d.labels.insert(d.labels.end(), d.histogram[c],
                      static_cast<std::uint32_t>(c));
    }
    std::shuffle(d.labels.begin(), d.labels.end(), rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    d.features = Matrix(n, spec.features);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t f = 0; f < spec.features; ++f) {
        d.features(r, f) = means(d.labels[r], f) + spec.noise * noise(rng);
      }
    }

    // Stratified holdout split.
    std::vector<std::vector<std::size_t>> by_class(spec.classes);
    for (std::size_t r = 0; r < n; ++r) by_class[d.labels[r]].push_back(r);
    for (auto& rows : by_class) {
      std::shuffle(rows.begin(), rows.end(), rng);
      const auto held = static_cast<std::size_t>(
          std::floor(spec.holdout_fraction * static_cast<double>(rows.size()) + 0.5));
      d.holdout.insert(d.holdout.end(), rows.begin(),
                       rows.begin() + static_cast<std::ptrdiff_t>(held));
      d.train.insert(d.train.end(),
                     rows.begin() + static_cast<std::ptrdiff_t>(held), rows.end());
    }
    std::sort(d.holdout.begin(), d.holdout.end());
    std::sort(d.train.begin(), d.train.end());
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<ClientDataset> GenerateNonIidData(const Population& population,
                                              const DataSpec& spec,
                                              std::uint64_t seed) {
  const auto ids = population.ids();
  const auto by_time = population.ids_by_round_time();
  std::unordered_map<std::uint32_t, double> rank;
  const double last = static_cast<double>(std::max<std::size_t>(1, by_time.size() - 1));
  for (std::size_t i = 0; i < by_time.size(); ++i) {
    rank[by_time[i].value] = static_cast<double>(i) / last;
  }
  std::vector<std::uint64_t> counts;
  std::vector<double> ranks;
  for (ClientId id : ids) {
    counts.push_back(population.client(id).num_samples);
    ranks.push_back(rank[id.value]);
  }
  auto data = GenerateNonIidData(counts, ranks, spec, seed);
  for (std::size_t i = 0; i < ids.size(); ++i) data[i].id = ids[i];
  return data;
}

double SoftmaxLoss(const GlobalModel& model, const Matrix& features,
                   std::span<const std::uint32_t> labels,
                   std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all = AllRows(features.rows);
    rows = all;
  }
  if (rows.empty()) return 0.0;
  std::vector<double> z(model.classes());
  double loss = 0.0;
  for (std::size_t r : rows) {
    Logits(model, features.row(r), z);
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    loss += top + std::log(sum) - z[labels[r]];
  }
  return loss / static_cast<double>(rows.size());
}

ModelDelta SoftmaxGradient(const GlobalModel& model, const Matrix& features,
                           std::span<const std::uint32_t> labels,
                           std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all = AllRows(features.rows);
    rows = all;
  }
  ModelDelta g = ZeroDelta(model.classes(), model.features());
  if (rows.empty()) return g;
  std::vector<double> p(model.classes());
  for (std::size_t r : rows) {
    const auto x = features.row(r);
    Logits(model, x, p);
    Softmax(p);
    p[labels[r]] -= 1.0;
    for (std::size_t c = 0; c < model.classes(); ++c) {
      g.bias[c] += p[c];
      for (std::size_t f = 0; f < x.size(); ++f) g.weights(c, f) += p[c] * x[f];
    }
  }
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (auto& v : g.weights.data) v *= scale;
  for (auto& v : g.bias) v *= scale;
  return g;
}

std::uint32_t Predict(const GlobalModel& model, std::span<const double> x) {
  std::vector<double> z(model.classes());
  Logits(model, x, z);
  return static_cast<std::uint32_t>(std::max_element(z.begin(), z.end()) -
                                    z.begin());
}

ModelDelta LocalTrain(const GlobalModel& snapshot, const ClientDataset& data,
                      const LocalTrainParams& params) {
  if (params.batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (data.train.empty() || params.epochs == 0) {
    return ZeroDelta(snapshot.classes(), snapshot.features());
  }
  GlobalModel local = snapshot;
  Rng rng = MakeRng(params.seed);
  std::vector<std::size_t> order = data.train;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t end = std::min(order.size(), start + params.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      const ModelDelta g = SoftmaxGradient(local, data.features, data.labels, batch);
      for (std::size_t i = 0; i < g.weights.data.size(); ++i) {
        local.weights.data[i] -= params.learning_rate * g.weights.data[i];
      }
      for (std::size_t c = 0; c < g.bias.size(); ++c) {
        local.bias[c] -= params.learning_rate * g.bias[c];
      }
    }
  }
  ModelDelta delta = ZeroDelta(snapshot.classes(), snapshot.features());
  for (std::size_t i = 0; i < delta.weights.data.size(); ++i) {
    delta.weights.data[i] = local.weights.data[i] - snapshot.weights.data[i];
  }
  for (std::size_t c = 0; c < delta.bias.size(); ++c) {
    delta.bias[c] = local.bias[c] - snapshot.bias[c];
  }
  return delta;
}

GlobalModel FedAvgAggregate(const GlobalModel& snapshot,
                            std::span<const WeightedDelta> deltas) {
  if (deltas.empty()) throw ConfigError("nothing to aggregate");
  std::uint64_t total = 0;
  for (const auto& d : deltas) {
    if (d.delta == nullptr ||
        d.delta->weights.data.size() != snapshot.weights.data.size() ||
        d.delta->bias.size() != snapshot.bias.size()) {
      throw ConfigError("delta shape does not match the global model");
    }
    total += d.samples;
  }
  GlobalModel next = snapshot;
  for (const auto& d : deltas) {
    const double w = total > 0
                         ? static_cast<double>(d.samples) / static_cast<double>(total)
                         : 1.0 / static_cast<double>(deltas.size());
    for (std::size_t i = 0; i < next.weights.data.size(); ++i) {
      next.weights.data[i] += w * d.delta->weights.data[i];
    }
    for (std::size_t c = 0; c < next.bias.size(); ++c) {
      next.bias[c] += w * d.delta->bias[c];
    }
  }
  next.version = snapshot.version + 1;
  return next;
}

namespace {

struct HoldoutScore {
  ConfusionMatrix cm;
  double loss_sum = 0.0;
};

HoldoutScore ScoreHoldout(const GlobalModel& model, const ClientDataset& d) {
  HoldoutScore s{ConfusionMatrix(model.classes())};
  std::vector<double> z(model.classes());
  for (std::size_t r : d.holdout) {
    const auto x = d.features.row(r);
    Logits(model, x, z);
    const auto predicted = static_cast<std::size_t>(
        std::max_element(z.begin(), z.end()) - z.begin());
    s.cm.Add(d.labels[r], predicted);
    const double top = z[predicted];
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - top);
    s.loss_sum += top + std::log(sum) - z[d.labels[r]];
  }
  return s;
}

RoundMetrics GlobalMetrics(const GlobalModel& model,
                           std::span<const ClientDataset> datasets,
                           std::size_t round) {
  ConfusionMatrix all(model.classes());
  double loss = 0.0;
  for (const auto& d : datasets) {
    const HoldoutScore s = ScoreHoldout(model, d);
    for (std::size_t i = 0; i < model.classes(); ++i) {
      for (std::size_t j = 0; j < model.classes(); ++j) {
        all.Add(i, j, s.cm.at(i, j));
      }
    }
    loss += s.loss_sum;
  }
  const auto n = static_cast<double>(all.total());
  return {round, Accuracy(all), n > 0 ? loss / n : 0.0};
}

}  // namespace

TrainResult FederatedTrain(const Population& population,
                           std::span<const ClientDataset> datasets,
                           const PolicyConfig& policy_config, std::size_t rounds,
                           const TrainHyper& hyper, std::uint64_t seed,
                           Coordinator& coordinator) {
  if (datasets.size() != population.size()) {
    throw ConfigError("need exactly one dataset per client");
  }
  std::unordered_map<std::uint32_t, const ClientDataset*> by_id;
  for (const auto& d : datasets) {
    const auto& client = population.client(d.id);
    if (d.labels.size() != client.num_samples ||
        d.features.rows != client.num_samples) {
      throw ConfigError("dataset of client " + std::to_string(d.id.value) +
                        " does not hold num_samples rows");
    }
    if (!by_id.emplace(d.id.value, &d).second) {
      throw ConfigError("two datasets for client " + std::to_string(d.id.value));
    }
  }
  std::size_t classes = 0;
  const std::size_t features = datasets.front().features.cols;
  for (const auto& d : datasets) {
    if (d.features.cols != features) throw ConfigError("feature widths differ");
    classes = std::max(classes, d.histogram.size());
  }

  SelectionPolicy policy(population, policy_config);
  ReportBuilder builder(population, policy_config);
  TrainResult result;
  result.model = GlobalModel(classes, features);

  for (std::size_t round = 0; round < rounds; ++round) {
    const RoundSelection selection = policy.Next();
    const auto snapshot = std::make_shared<const GlobalModel>(result.model);
    const std::uint64_t round_seed = DeriveSeed(seed, static_cast<std::uint64_t>(round));

    Coordinator::Work<ModelDelta> work = [&, snapshot](ClientId id) {
      LocalTrainParams params{hyper.epochs, hyper.learning_rate, hyper.batch_size,
                              DeriveSeed(round_seed, static_cast<std::uint64_t>(id.value))};
      return WorkOutcome<ModelDelta>{LocalTrain(*snapshot, *by_id.at(id.value), params),
                                     population.round_time(id)};
    };

    std::vector<Completed<ModelDelta>> done;
    if (policy_config.kind == PolicyKind::kFedCS) {
      done = coordinator.DispatchFirstK(std::span<const ClientId>(selection.invited),
                                        policy_config.clients_per_round, work);
    } else {
      done = coordinator.DispatchRound(std::span<const ClientId>(selection.aggregated),
                                       work);
    }
    if (done.size() != selection.aggregated.size()) {
      throw std::logic_error("coordinator returned the wrong number of updates");
    }

    std::vector<WeightedDelta> weighted;
    weighted.reserve(done.size());
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (done[i].client != selection.aggregated[i]) {
        throw std::logic_error("coordinator kept a different client set");
      }
      weighted.push_back({&done[i].value, by_id.at(done[i].client.value)->train.size()});
    }
    result.model = FedAvgAggregate(*snapshot, weighted);
    builder.Add(selection);

    if (hyper.eval_every > 0 &&
        ((round + 1) % hyper.eval_every == 0 || round + 1 == rounds)) {
      result.curve.push_back(GlobalMetrics(result.model, datasets, round));
    }
  }
  result.report = std::move(builder).Finish();
  return result;
}

EvalReport EvaluatePerClient(const GlobalModel& model,
                             std::span<const ClientDataset> datasets,
                             const Population& population,
                             std::size_t group_size) {
  EvalReport report;
  ConfusionMatrix all(model.classes());
  double loss = 0.0;
  std::unordered_map<std::uint32_t, std::size_t> position;
  for (const auto& d : datasets) {
    const HoldoutScore s = ScoreHoldout(model, d);
    ClientEval e;
    e.id = d.id;
    e.round_time = population.round_time(d.id);
    e.holdout_size = d.holdout.size();
    e.accuracy = Accuracy(s.cm);
    e.weighted_f1 = F1Weighted(s.cm);
    report.clients.push_back(e);
    for (std::size_t i = 0; i < model.classes(); ++i) {
      for (std::size_t j = 0; j < model.classes(); ++j) all.Add(i, j, s.cm.at(i, j));
    }
    loss += s.loss_sum;
  }
  std::sort(report.clients.begin(), report.clients.end(),
            [](const ClientEval& a, const ClientEval& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < report.clients.size(); ++i) {
    position[report.clients[i].id.value] = i;
  }

  std::vector<ClientId> order;
  for (ClientId id : population.ids_by_round_time()) {
    if (position.count(id.value)) order.push_back(id);
  }
  const std::size_t group = std::min(group_size, order.size() / 2);
  report.fastest.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(group));
  report.slowest.assign(order.rbegin(), order.rbegin() + static_cast<std::ptrdiff_t>(group));

  auto average = [&](const std::vector<ClientId>& ids, double ClientEval::*field) {
    if (ids.empty()) return 0.0;
    double sum = 0.0;
    for (ClientId id : ids) sum += report.clients[position[id.value]].*field;
    return sum / static_cast<double>(ids.size());
  };
  report.slow_accuracy = average(report.slowest, &ClientEval::accuracy);
  report.fast_accuracy = average(report.fastest, &ClientEval::accuracy);
  report.slow_f1 = average(report.slowest, &ClientEval::weighted_f1);
  report.fast_f1 = average(report.fastest, &ClientEval::weighted_f1);
  report.global_accuracy = Accuracy(all);
  report.global_f1 = F1Weighted(all);
  report.global_loss = all.total() > 0 ? loss / static_cast<double>(all.total()) : 0.0;
  return report;
}

nlohmann::json EvalToJson(const EvalReport& report) {
  nlohmann::json doc;
  auto& clients = doc["clients"] = nlohmann::json::array();
  for (const auto& c : report.clients) {
    clients.push_back({{"id", c.id.value},
                       {"round_time_s", c.round_time},
                       {"holdout_size", c.holdout_size},
                       {"accuracy", c.accuracy},
                       {"weighted_f1", c.weighted_f1}});
  }
  auto ids = [](const std::vector<ClientId>& v) {
    auto arr = nlohmann::json::array();
    for (ClientId id : v) arr.push_back(id.value);
    return arr;
  };
  doc["slowest"] = ids(report.slowest);
  doc["fastest"] = ids(report.fastest);
  doc["slow_accuracy"] = report.slow_accuracy;
  doc["fast_accuracy"] = report.fast_accuracy;
  doc["slow_weighted_f1"] = report.slow_f1;
  doc["fast_weighted_f1"] = report.fast_f1;
  doc["global_accuracy"] = report.global_accuracy;
  doc["global_weighted_f1"] = report.global_f1;
  doc["global_loss"] = report.global_loss;
  return doc;
}

}  // namespace fedss
