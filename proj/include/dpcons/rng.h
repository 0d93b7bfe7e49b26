// Copyright 2026 The dpcons Authors
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

// Counter-based random streams.
//
// Every draw is a pure function of (stream key, counter): the value at
// counter k of a stream with key K is SplitMix64's output function applied
// to K + (k + 1) * 0x9E3779B97F4A7C15. Keys for nested substreams (run,
// agent, ...) are derived by hashing the parent key with the child index.
// There is no hidden state, so runs can be evaluated in any order and on
// any number of threads with identical results, and extending a horizon or
// adding agents never perturbs the draws of an existing substream.

#ifndef DPCONS_RNG_H_
#define DPCONS_RNG_H_

#include <cstdint>
#include <string_view>

namespace dpcons {

// Recorded in experiment metadata.
inline constexpr std::string_view kPrngAlgorithm = "splitmix64-counter-v1";

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output mix (Stafford variant 13).
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Key of child stream `index` under `parent`.
constexpr std::uint64_t DeriveKey(std::uint64_t parent, std::uint64_t index) {
  return Mix64(parent ^ Mix64(index * kGoldenGamma + 0x632BE59BD9B4E019ULL));
}

// Fixed domain tags so that different consumers of one master seed get
// unrelated key trees.
enum class StreamDomain : std::uint64_t {
  kNoise = 0x6E6F697365ULL,
  kInitialState = 0x7374617465ULL,
  kGraph = 0x6772617068ULL,
};

constexpr std::uint64_t DomainKey(std::uint64_t seed, StreamDomain domain) {
  return DeriveKey(seed, static_cast<std::uint64_t>(domain));
}

class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t key() const { return key_; }

  constexpr std::uint64_t Bits(std::uint64_t counter) const {
    return Mix64(key_ + (counter + 1) * kGoldenGamma);
  }

  // Uniform on the open interval (0, 1): 52 random bits centered in their
  // cell, so both endpoints are unreachable and every value is exact.
  double UniformOpen(std::uint64_t counter) const {
    return (static_cast<double>(Bits(counter) >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform on the open interval (-1/2, 1/2).
  double UniformCentered(std::uint64_t counter) const {
    return UniformOpen(counter) - 0.5;
  }

  // Standard normal via the cosine branch of Box-Muller, consuming counters
  // 2*index and 2*index + 1.
  double StandardNormal(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

}  // namespace dpcons

#endif  // DPCONS_RNG_H_
