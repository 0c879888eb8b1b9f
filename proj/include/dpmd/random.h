// Copyright 2026 The DP Manifold Denoising Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMD_RANDOM_H_
#define DPMD_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpmd {

// The random stream used throughout the library. Every sampling routine takes
// one by reference; callers own it exclusively while sampling.
using RandomStream = std::mt19937_64;

// Mechanism tags for noise substreams.
enum class Mechanism : uint64_t { kProjector = 1, kMean = 2 };

// Mixes `master` with an ordered list of keys into a new 64-bit seed. Distinct
// key tuples yield statistically independent streams, so results do not depend
// on the order in which substreams are consumed.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> keys);

inline RandomStream MakeStream(uint64_t master,
                               std::initializer_list<uint64_t> keys) {
  return RandomStream(DeriveSeed(master, keys));
}

// Substream for the noise of one mechanism at step `step` of query `query`.
inline RandomStream NoiseStream(uint64_t master, uint64_t query,
                                uint64_t step, Mechanism mechanism) {
  return MakeStream(master,
                    {query, step, static_cast<uint64_t>(mechanism)});
}

}  // namespace dpmd

#endif  // DPMD_RANDOM_H_
