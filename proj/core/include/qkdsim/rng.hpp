// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace qkd::rng {

using Block = std::array<std::uint64_t, 4>;

struct Key {
  std::uint64_t k0 = 0;
  std::uint64_t k1 = 0;
};

struct Counter {
  std::uint64_t c0 = 0;
  std::uint64_t c1 = 0;
  std::uint64_t c2 = 0;
  std::uint64_t c3 = 0;
};

// Philox-4x64 keyed counter permutation, 10 rounds (Salmon et al., SC'11).
// Pure function of (counter, key): any subset of counters can be evaluated
// in any order, on any thread, with identical results.
Block philox4x64(const Counter& ctr, const Key& key);

// Disjoint sub-streams of one seed. Each subsystem draws from its own
// purpose tag so consumption in one never perturbs another.
enum class StreamPurpose : std::uint64_t {
  Source = 0,     // transmitter random numbers
  Channel = 1,    // photon routing, clicks, dark counts
  Clock = 2,      // timestamp jitter
  Aggregate = 3,  // aggregate-mode count sampling
  TestBits = 4,   // test-bit partitioning
};

// Random-access keyed stream: block(index, phase) is pure.
class Stream {
 public:
  Stream(std::uint64_t seed, StreamPurpose purpose)
      : key_{seed, static_cast<std::uint64_t>(purpose)} {}

  Block block(std::uint64_t index, std::uint64_t phase = 0) const {
    return philox4x64(Counter{index, phase, 0, 0}, key_);
  }

 private:
  Key key_;
};

// [0, 1) from the top 53 bits of a word.
inline double to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// (0, 1]; safe as a log() argument.
inline double to_unit_positive(std::uint64_t word) {
  return static_cast<double>((word >> 11) + 1) * 0x1.0p-53;
}

// Sequential view over a stream. Satisfies UniformRandomBitGenerator.
class Engine {
 public:
  using result_type = std::uint64_t;

  explicit Engine(Stream stream, std::uint64_t start_index = 0)
      : stream_(stream), index_(start_index), lane_(4) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    if (lane_ == 4) {
      buffer_ = stream_.block(index_++);
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  double uniform() { return to_unit((*this)()); }
  double uniform_positive() { return to_unit_positive((*this)()); }

 private:
  Stream stream_;
  std::uint64_t index_;
  Block buffer_{};
  int lane_;
};

// Box-Muller transform; u_positive in (0,1], u_angle in [0,1).
std::pair<double, double> gaussian_pair(double u_positive, double u_angle);

double gaussian(Engine& engine);

}  // namespace qkd::rng
