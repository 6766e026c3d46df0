// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/synchronizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qkdsim/errors.hpp"

namespace qkd {

namespace {

double observed_time(double true_time_s, const ClockModel& clock, double jitter) {
  return clock.offset_s + true_time_s * (1.0 + clock.drift_ppm * 1e-6) + jitter;
}

double jitter_draw(const ClockModel& clock, const rng::Stream& stream,
                   std::uint64_t index, std::uint64_t phase) {
  if (clock.jitter_s == 0.0) return 0.0;
  rng::Block block = stream.block(index, phase);
  auto [g, unused] = rng::gaussian_pair(rng::to_unit_positive(block[0]),
                                        rng::to_unit(block[1]));
  return clock.jitter_s * g;
}

}  // namespace

TimestampSet emit_timestamps(const std::vector<std::int64_t>& slot_indices,
                             const ClockModel& clock, const ProtocolParams& params,
                             const rng::Stream& clock_stream) {
  if (clock.jitter_s < 0.0) {
    throw ValidationError("clock model: jitter must be >= 0");
  }
  if (!std::is_sorted(slot_indices.begin(), slot_indices.end())) {
    throw ValidationError("emit_timestamps: slot indices must be sorted ascending");
  }

  double slot_period = 1.0 / params.pulse_rate_hz;
  std::int64_t spb = params.slots_per_block();

  TimestampSet out;
  out.detection_timestamps_s.reserve(slot_indices.size());
  for (std::int64_t slot : slot_indices) {
    double true_time = static_cast<double>(slot) * slot_period;
    out.detection_timestamps_s.push_back(observed_time(
        true_time, clock, jitter_draw(clock, clock_stream,
                                      static_cast<std::uint64_t>(slot), 0)));
  }

  std::int64_t max_slot = slot_indices.empty() ? -1 : slot_indices.back();
  std::int64_t n_blocks = slot_indices.empty() ? 0 : max_slot / spb + 1;
  out.frames.reserve(static_cast<std::size_t>(n_blocks));
  for (std::int64_t b = 0; b < n_blocks; ++b) {
    double true_time = static_cast<double>(b * spb) * slot_period;
    out.frames.push_back(
        {b, observed_time(true_time, clock,
                          jitter_draw(clock, clock_stream,
                                      static_cast<std::uint64_t>(b), 1))});
  }
  return out;
}

std::vector<RecoveredSlot> recover_indices(const std::vector<double>& timestamps,
                                           const std::vector<SyncFrame>& frames,
                                           const ProtocolParams& params,
                                           double guard_band) {
  if (guard_band < 0.0 || guard_band >= 0.5) {
    throw ValidationError("recover_indices: guard band must lie in [0, 0.5)");
  }
  double slot_period = 1.0 / params.pulse_rate_hz;
  std::int64_t spb = params.slots_per_block();

  std::vector<RecoveredSlot> out;
  out.reserve(timestamps.size());
  for (double t : timestamps) {
    // Last frame at or before t.
    auto it = std::upper_bound(
        frames.begin(), frames.end(), t,
        [](double value, const SyncFrame& f) { return value < f.sync_timestamp_s; });
    if (it == frames.begin()) {
      out.push_back({RecoveryStatus::OutOfRange, -1});
      continue;
    }
    const SyncFrame& frame = *(it - 1);

    double slots_from_sync = (t - frame.sync_timestamp_s) / slot_period;
    auto in_block = static_cast<std::int64_t>(std::llround(slots_from_sync));
    double phase = slots_from_sync - std::floor(slots_from_sync);

    // in_block == spb means the detection sits at the next block boundary;
    // anything beyond that overran the block span.
    if (in_block > spb) {
      out.push_back({RecoveryStatus::OutOfRange, -1});
      continue;
    }
    std::int64_t slot = frame.block_index * spb + in_block;
    bool ambiguous = std::abs(phase - 0.5) < guard_band;
    out.push_back({ambiguous ? RecoveryStatus::Ambiguous : RecoveryStatus::Recovered,
                   slot});
  }
  return out;
}

double max_tolerable_drift_ppm(std::int64_t slots_per_block, double jitter_margin) {
  if (slots_per_block <= 0) {
    throw ValidationError("max_tolerable_drift_ppm: slots_per_block must be > 0");
  }
  return (0.5 - jitter_margin) / static_cast<double>(slots_per_block) * 1e6;
}

void write_timestamp_dump(std::ostream& out, const std::vector<double>& timestamps) {
  for (double t : timestamps) {
    out << static_cast<std::int64_t>(std::llround(t * 1e9)) << '\n';
  }
}

void write_frame_dump(std::ostream& out, const std::vector<SyncFrame>& frames) {
  for (const SyncFrame& f : frames) {
    out << f.block_index << ','
        << static_cast<std::int64_t>(std::llround(f.sync_timestamp_s * 1e9)) << '\n';
  }
}

}  // namespace qkd
