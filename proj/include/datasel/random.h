/* Copyright 2026 The datasel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Counter-based random numbers (Philox4x32-10).
//
// Every draw is a pure function of (seed, stream, index), so any value can be
// regenerated without replaying earlier draws. Uniform, bounded and normal
// draws are implemented here; <random> distributions are implementation
// defined and would break byte-identical outputs across toolchains.

#ifndef DATASEL_RANDOM_H_
#define DATASEL_RANDOM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace datasel {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// One Philox4x32 block with ten rounds.
PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

// 64 random bits addressed by (seed, stream, index).
std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

// Sequential view over one (seed, stream) pair.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return random_bits(seed_, stream_, index_++); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, bound); bound must be nonzero. Unbiased (rejection).
  std::uint64_t uniform_below(std::uint64_t bound);

  // Standard normal via Box-Muller; consumes exactly two draws.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t position() const { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

// Fisher-Yates shuffle of 0..n-1 driven by RandomStream(seed, stream).
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed,
                                            std::uint64_t stream);

}  // namespace datasel

#endif  // DATASEL_RANDOM_H_
