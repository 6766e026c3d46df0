// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>

#include "qkdsim/io.hpp"
#include "qkdsim/sifting.hpp"
#include "qkdsim/transmission.hpp"

namespace qkd {

enum class SimMode : std::uint8_t { PerPulse = 0, Aggregate = 1 };

struct SimOptions {
  SimMode mode = SimMode::Aggregate;
  std::uint64_t seed = 1;
  // PerPulse refuses larger runs; Aggregate is exact in expectation at any N.
  std::int64_t per_pulse_cap = 1'000'000'000;
  QberSource decoy_qber_source = QberSource::AllBits;
  QberSource signal_qber_source = QberSource::PhaseTestOnly;
  std::ostream* detection_dump = nullptr;  // optional CSV sinks
  std::ostream* plan_dump = nullptr;
};

struct SimOutputs {
  io::TallyFile tally_file;
  AggregateCounts counts;  // sampled in Aggregate mode, accumulated in PerPulse
  std::int64_t detections_total = 0;
  std::int64_t ambiguous_dropped = 0;   // sync recovery flagged, excluded
  std::int64_t out_of_range_dropped = 0;
};

// Runs the transmitter -> channel -> synchronization -> sifting pipeline and
// produces the tally consumed by the analysis. Deterministic per seed.
SimOutputs run_simulation(const io::SimConfig& config, const SimOptions& options);

}  // namespace qkd
