// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/rng.hpp"

#include <cmath>
#include <numbers>

namespace qkd::rng {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  unsigned __int128 product = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(product >> 64);
  lo = static_cast<std::uint64_t>(product);
}

inline void round_once(Block& x, const Key& key) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kMult0, x[0], hi0, lo0);
  mulhilo(kMult1, x[2], hi1, lo1);
  x = Block{hi1 ^ x[1] ^ key.k0, lo1, hi0 ^ x[3] ^ key.k1, lo0};
}

}  // namespace

Block philox4x64(const Counter& ctr, const Key& key) {
  Block x{ctr.c0, ctr.c1, ctr.c2, ctr.c3};
  Key k = key;
  round_once(x, k);
  for (int r = 1; r < 10; ++r) {
    k.k0 += kWeyl0;
    k.k1 += kWeyl1;
    round_once(x, k);
  }
  return x;
}

std::pair<double, double> gaussian_pair(double u_positive, double u_angle) {
  double radius = std::sqrt(-2.0 * std::log(u_positive));
  double angle = 2.0 * std::numbers::pi * u_angle;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double gaussian(Engine& engine) {
  return gaussian_pair(engine.uniform_positive(), engine.uniform()).first;
}

}  // namespace qkd::rng
