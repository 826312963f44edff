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

#ifndef FEDSS_APP_H_
#define FEDSS_APP_H_

#include <optional>
#include <ostream>

#include "fedss/clustering.h"
#include "fedss/config.h"
#include "fedss/knee.h"
#include "fedss/policies.h"

namespace fedss::app {

// Root seed split into named streams so subsystems vary independently.
struct Seeds {
  std::uint64_t population;
  std::uint64_t policy;
  std::uint64_t data;
  std::uint64_t training;
  std::uint64_t sweep;
};
Seeds SplitSeeds(std::uint64_t root);

Population BuildPopulation(const RunConfig& config);

SweepOptions SweepOptionsFor(const RunConfig& config, const Population& population);

struct FedSSClusters {
  ClusterSet clusters;
  std::optional<OptimalK> knee;  // set when k was chosen automatically
};

// Uses the configured k, or the knee of the sweep when k is not set.
FedSSClusters ResolveClusters(const RunConfig& config, const Population& population);

PolicyConfig MakePolicy(const RunConfig& config, PolicyKind kind,
                        const std::optional<ClusterSet>& clusters);

// Subcommands. Each writes its files under config.out and a short
// human-readable summary to `log`.
void RunCluster(const RunConfig& config, std::ostream& log);
void RunKnee(const RunConfig& config, std::ostream& log);
void RunSimulate(const RunConfig& config, std::ostream& log);
void RunTrain(const RunConfig& config, std::ostream& log);
void RunCompare(const RunConfig& config, std::ostream& log);

}  // namespace fedss::app

#endif  // FEDSS_APP_H_
