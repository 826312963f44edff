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

#include "fedss/kernels.h"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fedss/device_model.h"

namespace fedss::kernels {
namespace {

std::uint32_t Nearest(double value, std::span<const double> centroids) {
  std::uint32_t best = 0;
  double best_d = (value - centroids[0]) * (value - centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = (value - centroids[j]) * (value - centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(j);
    }
  }
  return best;
}

}  // namespace

void RoundTimes(std::span<const ClientProfile> clients,
                const GlobalModelSpec& model, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(clients.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = EstimateRoundTime(clients[i], model);
  }
}

void RoundTimesSerial(std::span<const ClientProfile> clients,
                      const GlobalModelSpec& model, std::span<double> out) {
  for (std::size_t i = 0; i < clients.size(); ++i) {
    out[i] = EstimateRoundTime(clients[i], model);
  }
}

void AssignNearest(std::span<const double> values,
                   std::span<const double> centroids,
                   std::span<std::uint32_t> out) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = Nearest(values[i], centroids);
  }
}

void AssignNearestSerial(std::span<const double> values,
                         std::span<const double> centroids,
                         std::span<std::uint32_t> out) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = Nearest(values[i], centroids);
  }
}

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace fedss::kernels
