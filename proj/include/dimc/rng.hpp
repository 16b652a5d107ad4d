// Copyright 2026 The dimc Authors
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

#ifndef DIMC_RNG_HPP
#define DIMC_RNG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace dimc {

/// Reproducible random stream identified by a (seed, stream id) pair.
/**
 * The generator is xoshiro256**; its 256-bit state is filled by running
 * SplitMix64 over a hash of the seed and the stream id, so every
 * (seed, stream) pair maps to its own well-separated sequence. All
 * variate transforms (uniform, normal, categorical) are implemented here
 * rather than through `<random>` distributions, which keeps draws
 * bit-identical across standard libraries.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class RngStream {
 public:
  using result_type = std::uint64_t;
  using State = std::array<std::uint64_t, 4>;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe to take the logarithm of.
  double uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Lemire's nearly-divisionless method.
  std::size_t uniform_index(std::size_t n);

  /// Standard normal draw (Marsaglia polar method, spare discarded).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Child stream derived from this stream's identity, not its position.
  RngStream split(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  const State& state() const { return state_; }
  void set_state(const State& state) { state_ = state; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  State state_{};
};

/// Deterministic stream id for (grid entry, replication) pairs.
std::uint64_t derive_stream_id(std::uint64_t entry, std::uint64_t replication);

}  // namespace dimc

#endif  // DIMC_RNG_HPP
