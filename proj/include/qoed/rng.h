// Copyright 2026 The qoed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QOED_RNG_H
#define QOED_RNG_H

#include <array>
#include <cstdint>

namespace qoed {

/// Philox4x64-10 block function (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). Pure: the same (counter, key) always gives the same 4 words.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key);

/// Version tag of the sampling stream layout below. Bump if the layout changes.
inline constexpr int kRngStreamVersion = 1;

/// Keyed uniform stream for one (seed, stream id) pair.
///
/// Layout (version 1): key = (seed, stream_id); draw k comes from block
/// counter (k / 4, 0, 0, 0), word k % 4, mapped to [0, 1) using its top 53 bits.
/// Any draw can be computed independently of all others.
class CounterStream {
   public:
    CounterStream(std::uint64_t seed, std::uint64_t stream_id) : key_{seed, stream_id} {
    }

    /// Uniform double in [0, 1) for draw index k.
    double uniform(std::uint64_t k);

   private:
    std::array<std::uint64_t, 2> key_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<std::uint64_t, 4> cache_{};
};

/// Deterministic 64-bit mix used to derive child seeds, e.g. per trial or per round.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace qoed

#endif  // QOED_RNG_H
