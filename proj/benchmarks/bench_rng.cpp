// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qkdsim/rng.hpp"
#include "qkdsim/sampling.hpp"

namespace {

void BM_PhiloxBlock(benchmark::State& state) {
  qkd::rng::Stream stream(1, qkd::rng::StreamPurpose::Channel);
  std::uint64_t index = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stream.block(index++));
  }
  state.SetItemsProcessed(state.iterations() * 4);  // 4 words per block
}
BENCHMARK(BM_PhiloxBlock);

void BM_UniformDoubles(benchmark::State& state) {
  qkd::rng::Engine engine(qkd::rng::Stream(1, qkd::rng::StreamPurpose::Aggregate));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.uniform());
  }
}
BENCHMARK(BM_UniformDoubles);

void BM_BinomialLargeN(benchmark::State& state) {
  qkd::rng::Engine engine(qkd::rng::Stream(2, qkd::rng::StreamPurpose::Aggregate));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkd::rng::binomial(engine, 494'240'000'000, 9.0941e-7));
  }
}
BENCHMARK(BM_BinomialLargeN);

}  // namespace
