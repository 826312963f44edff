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

// Times each OpenMP kernel against its serial reference and checks that both
// produce identical output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "CLI11.hpp"
#include "fedss/device_model.h"
#include "fedss/kernels.h"
#include "fedss/knee.h"

namespace {

double MedianSeconds(int reps, const std::function<void()>& fn) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

void Row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-14s %12.4f %12.4f %8.2fx  %s\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fedss kernel benchmark"};
  std::size_t clients = 2'000'000;
  std::size_t sweep_clients = 10'000;
  std::size_t sweep_rounds = 1000;
  int reps = 5;
  app.add_option("--clients", clients, "population size for the elementwise kernels");
  app.add_option("--sweep-clients", sweep_clients, "population size for the k sweep");
  app.add_option("--sweep-rounds", sweep_rounds, "rounds per k in the sweep");
  app.add_option("--reps", reps, "repetitions, the median is reported")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const fedss::GlobalModelSpec model(1e8, 2e9);
  const fedss::Population pop = fedss::SynthPopulation({}, model, clients, 1);
  std::printf("threads: %d\n", fedss::kernels::MaxThreads());
  std::printf("%-14s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

  std::vector<double> a(clients), b(clients);
  const double rt_serial = MedianSeconds(
      reps, [&] { fedss::kernels::RoundTimesSerial(pop.clients(), model, b); });
  const double rt_parallel =
      MedianSeconds(reps, [&] { fedss::kernels::RoundTimes(pop.clients(), model, a); });
  Row("round_times", rt_serial, rt_parallel, a == b);

  const std::vector<double> centroids{40, 80, 120, 160, 220, 300, 420, 600};
  std::vector<std::uint32_t> la(clients), lb(clients);
  const double nn_serial = MedianSeconds(
      reps, [&] { fedss::kernels::AssignNearestSerial(a, centroids, lb); });
  const double nn_parallel =
      MedianSeconds(reps, [&] { fedss::kernels::AssignNearest(a, centroids, la); });
  Row("assign_nearest", nn_serial, nn_parallel, la == lb);

  const fedss::Population small = fedss::SynthPopulation({}, model, sweep_clients, 2);
  fedss::SweepOptions options;
  options.k_max = fedss::DefaultMaxK(sweep_clients, options.clients_per_round);
  options.rounds = sweep_rounds;
  options.seed = 3;
  fedss::KneeCurve ca, cb;
  const int sweep_reps = std::max(1, reps / 2);
  const double sw_serial =
      MedianSeconds(sweep_reps, [&] { cb = fedss::SweepKSerial(small, options); });
  const double sw_parallel =
      MedianSeconds(sweep_reps, [&] { ca = fedss::SweepK(small, options); });
  bool same = ca.points.size() == cb.points.size();
  for (std::size_t i = 0; same && i < ca.points.size(); ++i) {
    same = ca.points[i].y == cb.points[i].y;
  }
  Row("sweep_k", sw_serial, sw_parallel, same);
  return same && a == b && la == lb ? 0 : 1;
}
