// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/rng.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"

using namespace qkd;
using rng::Block;

// Known-answer vectors for the 10-round 4x64 permutation, cross-checked
// against an independent implementation.
TEST_CASE("philox known answers") {
  CHECK(rng::philox4x64({0, 0, 0, 0}, {0, 0}) ==
        Block{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull,
              0x7e68b68aec7ba23bull});
  CHECK(rng::philox4x64({1, 0, 0, 0}, {0, 0}) ==
        Block{0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull, 0x1c8667a55d902e79ull,
              0x907d7a052fd5b4dcull});
  CHECK(rng::philox4x64({2, 0, 0, 0}, {0, 0}) ==
        Block{0x809bf322883987c3ull, 0x471128b9e807f7ddull, 0xf250ba0dbec065b7ull,
              0xfc6ed66767a457bcull});
  CHECK(rng::philox4x64({43, 1, 0, 0}, {7, 3}) ==
        Block{0xc761d48c671bc2e5ull, 0x35da4f7f7c2718eeull, 0xd90b4fd0e488910aull,
              0x2b8050ec4c4e01ebull});
}

TEST_CASE("streams with different purposes or seeds disagree") {
  rng::Stream a(42, rng::StreamPurpose::Source);
  rng::Stream b(42, rng::StreamPurpose::Channel);
  rng::Stream c(43, rng::StreamPurpose::Source);
  CHECK(a.block(0) != b.block(0));
  CHECK(a.block(0) != c.block(0));
  CHECK(a.block(5, 1) != a.block(5, 2));
  CHECK(a.block(7) == rng::Stream(42, rng::StreamPurpose::Source).block(7));
}

TEST_CASE("engine walks the stream in block order") {
  rng::Stream stream(9, rng::StreamPurpose::Aggregate);
  rng::Engine engine(stream);
  for (std::uint64_t index = 0; index < 3; ++index) {
    Block block = stream.block(index);
    for (int lane = 0; lane < 4; ++lane) {
      CHECK(engine() == block[lane]);
    }
  }
}

TEST_CASE("unit conversion ranges") {
  CHECK(rng::to_unit(0) == 0.0);
  CHECK(rng::to_unit(~0ull) < 1.0);
  CHECK(rng::to_unit_positive(0) > 0.0);
  CHECK(rng::to_unit_positive(~0ull) == 1.0);
}

TEST_CASE("uniform output passes a coarse equidistribution check") {
  rng::Engine engine(rng::Stream(1234, rng::StreamPurpose::Aggregate));
  constexpr int kBins = 16;
  constexpr std::int64_t kDraws = 1 << 20;
  std::array<std::int64_t, kBins> counts{};
  for (std::int64_t i = 0; i < kDraws; ++i) {
    ++counts[static_cast<int>(engine.uniform() * kBins)];
  }
  std::array<double, kBins> probs;
  probs.fill(1.0 / kBins);
  CHECK(test::chi_square(counts, probs, kDraws) < test::kChiSq15DofTail1e6);
}

TEST_CASE("gaussian moments") {
  rng::Engine engine(rng::Stream(77, rng::StreamPurpose::Clock));
  constexpr int kDraws = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    double g = rng::gaussian(engine);
    sum += g;
    sum_sq += g * g;
  }
  double mean = sum / kDraws;
  double var = sum_sq / kDraws - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(kDraws)));
  CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / kDraws));
}
