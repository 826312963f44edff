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

#ifndef FEDSS_RNG_H_
#define FEDSS_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace fedss {

using Rng = std::mt19937_64;

// Derives an independent seed for a named subsystem ("population", "policy",
// "data", "training") from the root seed.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view stream);

// Derives a per-index seed, e.g. (policy seed, round) or (sweep seed, k).
std::uint64_t DeriveSeed(std::uint64_t root, std::uint64_t index);

inline Rng MakeRng(std::uint64_t seed) { return Rng(seed); }

}  // namespace fedss

#endif  // FEDSS_RNG_H_
