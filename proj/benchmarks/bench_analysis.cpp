// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "qkdsim/decoy_analysis.hpp"
#include "qkdsim/refdata.hpp"

namespace {

void BM_SolveSinglePhoton(benchmark::State& state) {
  qkd::io::TallyFile ref = qkd::refdata::reference_tally();
  qkd::VacuumBounds vb = qkd::vacuum_bounds(
      ref.tally.counting_rate(qkd::IntensityClass::Vacuum),
      static_cast<double>(ref.tally.n_sent[0]), ref.analysis.n_sigma);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qkd::solve_single_photon(ref.tally, ref.analysis, vb.s0_low, vb.s0_low));
  }
}
BENCHMARK(BM_SolveSinglePhoton);

void BM_FullAnalysis(benchmark::State& state) {
  qkd::io::TallyFile ref = qkd::refdata::reference_tally();
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkd::analyze(ref.tally, ref.analysis));
  }
}
BENCHMARK(BM_FullAnalysis);

}  // namespace
