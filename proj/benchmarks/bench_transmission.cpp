// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qkdsim/refdata.hpp"
#include "qkdsim/transmission.hpp"

namespace {

void BM_DetectPulse(benchmark::State& state) {
  qkd::ProtocolParams params = qkd::refdata::reference_params();
  qkd::DetectionModel model(params, qkd::channel_from_params(params));
  qkd::SourceStream source(params, 1, 1 << 16);
  qkd::rng::Stream channel_stream(1, qkd::rng::StreamPurpose::Channel);
  std::int64_t slot = 0;
  for (auto _ : state) {
    qkd::PulsePlan plan = source.plan_at(slot++);
    benchmark::DoNotOptimize(model.detect_pulse(plan, channel_stream));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DetectPulse);

void BM_ClassStatistics(benchmark::State& state) {
  qkd::ProtocolParams params = qkd::refdata::reference_params();
  qkd::DetectionModel model(params, qkd::channel_from_params(params));
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.class_statistics(qkd::IntensityClass::Signal));
  }
}
BENCHMARK(BM_ClassStatistics);

void BM_Calibrate(benchmark::State& state) {
  qkd::io::TallyFile ref = qkd::refdata::reference_tally();
  qkd::ProtocolParams base;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkd::calibrate_channel(ref.tally, base));
  }
}
BENCHMARK(BM_Calibrate);

}  // namespace
