// Copyright 2026 The Orion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Hashing and random number generation shared by every module.
//
// Campaign randomness is counter based: each stream is identified by a key
// derived from (master seed, api, iteration, rule, ...), so any worker can
// reconstruct any stream without coordination, and a MutationNote only needs
// to carry the 64-bit key to replay a mutation.

#ifndef ORION_RNG_H_
#define ORION_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace orion {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

// FNV-1a, 64 bit. Stable across platforms; used for content ids.
constexpr std::uint64_t Fnv1a64(std::string_view bytes,
                                std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// 16 lowercase hex digits.
std::string HexDigest(std::uint64_t h);

// Combines a parent key with a sequence of labels into a child stream key.
class KeyBuilder {
 public:
  explicit KeyBuilder(std::uint64_t root) : h_(Mix64(root ^ 0x6a09e667f3bcc909ULL)) {}
  KeyBuilder& Add(std::string_view label) {
    h_ = Mix64(Fnv1a64(label, h_ ^ 0x9e3779b97f4a7c15ULL));
    return *this;
  }
  KeyBuilder& Add(std::uint64_t v) {
    h_ = Mix64(h_ + 0x9e3779b97f4a7c15ULL * (v + 1));
    return *this;
  }
  std::uint64_t key() const { return h_; }

 private:
  std::uint64_t h_;
};

// SplitMix64 stream. Satisfies UniformRandomBitGenerator, but the helpers
// below are preferred: std distributions are not reproducible across
// standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;
  explicit Rng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix64(state_);
  }

  // Uniform in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);
  // Uniform in [lo, hi], inclusive.
  std::int64_t Range(std::int64_t lo, std::int64_t hi);
  bool Coin() { return ((*this)() >> 63) != 0; }
  double Unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Key for a child stream; the parent stream advances by one draw.
  std::uint64_t Fork() { return (*this)(); }

 private:
  std::uint64_t state_;
};

}  // namespace orion

#endif  // ORION_RNG_H_
