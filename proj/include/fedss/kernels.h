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

#ifndef FEDSS_KERNELS_H_
#define FEDSS_KERNELS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace fedss {

class GlobalModelSpec;
struct ClientProfile;

// Data-parallel inner loops. Every OpenMP kernel has a serial twin that is
// kept as the reference for tests and the benchmark; both must produce
// bit-identical output.
namespace kernels {

void RoundTimes(std::span<const ClientProfile> clients,
                const GlobalModelSpec& model, std::span<double> out);
void RoundTimesSerial(std::span<const ClientProfile> clients,
                      const GlobalModelSpec& model, std::span<double> out);

// Index of the nearest centroid by squared distance for every value; ties go
// to the lower index.
void AssignNearest(std::span<const double> values,
                   std::span<const double> centroids,
                   std::span<std::uint32_t> out);
void AssignNearestSerial(std::span<const double> values,
                         std::span<const double> centroids,
                         std::span<std::uint32_t> out);

int MaxThreads();

}  // namespace kernels
}  // namespace fedss

#endif  // FEDSS_KERNELS_H_
