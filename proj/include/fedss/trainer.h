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

#ifndef FEDSS_TRAINER_H_
#define FEDSS_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedss/device_model.h"
#include "fedss/orchestrator.h"
#include "fedss/policies.h"
#include "fedss/simulator.h"
#include "json.hpp"

namespace fedss {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
};

// Multinomial logistic regression.
struct GlobalModel {
  Matrix weights;             // classes x features
  std::vector<double> bias;   // classes
  std::size_t version = 0;    // rounds aggregated so far

  GlobalModel() = default;
  GlobalModel(std::size_t classes, std::size_t features)
      : weights(classes, features), bias(classes, 0.0) {}

  std::size_t classes() const { return weights.rows; }
  std::size_t features() const { return weights.cols; }
  bool finite() const;
};

// Difference between a locally trained model and the snapshot it started
// from. Also used for gradients, which have the same shape.
struct ModelDelta {
  Matrix weights;
  std::vector<double> bias;
};

struct ClientDataset {
  ClientId id;
  Matrix features;                    // samples x features
  std::vector<std::uint32_t> labels;  // one per row
  std::vector<std::size_t> histogram; // samples per class
  std::vector<std::size_t> train;     // row indices
  std::vector<std::size_t> holdout;   // row indices, disjoint from train
};

struct DataSpec {
  std::size_t classes = 10;
  std::size_t features = 10;
  double alpha = 0.3;             // Dirichlet concentration per class
  double class_separation = 1.0;  // std of class-mean coordinates
  double noise = 1.0;             // std of features around their class mean
  double holdout_fraction = 0.2;
  // Shift each client's class prior toward classes matching its speed rank,
  // so slow clients hold data that fast clients mostly lack.
  bool speed_correlated = false;
  double correlation_width = 0.15;
};

// One dataset per entry of `sample_counts` with ids 0..n-1. `speed_rank`
// (0 = fastest, 1 = slowest) is required when spec.speed_correlated is set.
std::vector<ClientDataset> GenerateNonIidData(
    std::span<const std::uint64_t> sample_counts,
    std::span<const double> speed_rank, const DataSpec& spec,
    std::uint64_t seed);

// Uses each client's id, num_samples and round-time rank.
std::vector<ClientDataset> GenerateNonIidData(const Population& population,
                                              const DataSpec& spec,
                                              std::uint64_t seed);

// Mean softmax cross-entropy over `rows` (all rows when empty).
double SoftmaxLoss(const GlobalModel& model, const Matrix& features,
                   std::span<const std::uint32_t> labels,
                   std::span<const std::size_t> rows);

// Gradient of SoftmaxLoss with respect to weights and bias.
ModelDelta SoftmaxGradient(const GlobalModel& model, const Matrix& features,
                           std::span<const std::uint32_t> labels,
                           std::span<const std::size_t> rows);

std::uint32_t Predict(const GlobalModel& model, std::span<const double> x);

struct LocalTrainParams {
  std::size_t epochs = 1;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

// Mini-batch gradient descent over the client's training rows.
ModelDelta LocalTrain(const GlobalModel& snapshot, const ClientDataset& data,
                      const LocalTrainParams& params);

struct WeightedDelta {
  const ModelDelta* delta = nullptr;
  std::uint64_t samples = 0;
};

// snapshot + sum_i (S_i / sum_j S_j) * delta_i, version + 1. Falls back to
// equal weights when every sample count is zero.
GlobalModel FedAvgAggregate(const GlobalModel& snapshot,
                            std::span<const WeightedDelta> deltas);

struct TrainHyper {
  std::size_t epochs = 1;
  double learning_rate = 0.05;
  std::size_t batch_size = 16;
  std::size_t eval_every = 1;  // 0 disables the per-round curve
};

struct RoundMetrics {
  std::size_t round = 0;
  double accuracy = 0.0;  // over the union of all holdout splits
  double loss = 0.0;
};

struct TrainResult {
  GlobalModel model;
  SimulationReport report;
  std::vector<RoundMetrics> curve;
};

// Each round: the policy selects, the coordinator runs LocalTrain on the
// selected clients concurrently and FedAvg combines the aggregated set.
// Simulated time is accounted exactly as in Simulate().
TrainResult FederatedTrain(const Population& population,
                           std::span<const ClientDataset> datasets,
                           const PolicyConfig& policy, std::size_t rounds,
                           const TrainHyper& hyper, std::uint64_t seed,
                           Coordinator& coordinator);

struct ClientEval {
  ClientId id;
  double round_time = 0.0;
  std::size_t holdout_size = 0;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
};

struct EvalReport {
  std::vector<ClientEval> clients;  // ascending id
  std::vector<ClientId> slowest;    // by round time, slowest first
  std::vector<ClientId> fastest;    // by round time, fastest first
  double slow_accuracy = 0.0;
  double fast_accuracy = 0.0;
  double slow_f1 = 0.0;
  double fast_f1 = 0.0;
  double global_accuracy = 0.0;
  double global_f1 = 0.0;
  double global_loss = 0.0;
};

// Evaluates the global model on every client's holdout split. Group averages
// cover the `group_size` slowest and fastest clients.
EvalReport EvaluatePerClient(const GlobalModel& model,
                             std::span<const ClientDataset> datasets,
                             const Population& population,
                             std::size_t group_size = 4);

nlohmann::json EvalToJson(const EvalReport& report);

}  // namespace fedss

#endif  // FEDSS_TRAINER_H_
