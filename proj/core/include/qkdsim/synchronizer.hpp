// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "qkdsim/params.hpp"
#include "qkdsim/rng.hpp"

namespace qkd {

// Bob's local clock relative to Alice's.
struct ClockModel {
  double drift_ppm = 0.0;  // constant relative frequency error
  double jitter_s = 0.0;   // RMS Gaussian timestamp jitter
  double offset_s = 0.0;   // initial phase offset
};

// One synchronization pulse: the observed start-of-block mark.
struct SyncFrame {
  std::int64_t block_index = 0;
  double sync_timestamp_s = 0.0;
};

struct TimestampSet {
  std::vector<double> detection_timestamps_s;  // parallel to the input slots
  std::vector<SyncFrame> frames;
};

// Observed time of slot k: offset + (k / f) * (1 + drift_ppm * 1e-6) + jitter.
// Sync frames are emitted every slots_per_block slots under the same
// distortion. Jitter draws are addressed by slot (detections) and block index
// (frames) in `clock_stream`. Slot indices must be sorted ascending.
TimestampSet emit_timestamps(const std::vector<std::int64_t>& slot_indices,
                             const ClockModel& clock, const ProtocolParams& params,
                             const rng::Stream& clock_stream);

enum class RecoveryStatus : std::uint8_t {
  Recovered = 0,
  Ambiguous = 1,   // in-slot phase within the guard band around 0.5
  OutOfRange = 2,  // timestamp precedes the first frame or overruns a block
};

struct RecoveredSlot {
  RecoveryStatus status = RecoveryStatus::OutOfRange;
  std::int64_t slot_index = -1;  // nearest slot; valid unless OutOfRange
};

// Recovers absolute slot indices block by block: each detection is referenced
// to the last preceding sync frame and rounded with the nominal slot period
// 1 / pulse_rate_hz. A detection whose in-slot phase falls within
// `guard_band` of the rounding boundary is flagged Ambiguous instead of being
// silently rounded.
std::vector<RecoveredSlot> recover_indices(const std::vector<double>& timestamps,
                                           const std::vector<SyncFrame>& frames,
                                           const ProtocolParams& params,
                                           double guard_band = 0.05);

// Largest constant drift (ppm) that keeps every slot of a block within half a
// slot of its nominal position, less a jitter allowance (in slot units):
// (0.5 - jitter_margin) / slots_per_block * 1e6.
double max_tolerable_drift_ppm(std::int64_t slots_per_block,
                               double jitter_margin = 0.0);

// timestamp_ns per line.
void write_timestamp_dump(std::ostream& out, const std::vector<double>& timestamps);
// block_index,timestamp_ns per line.
void write_frame_dump(std::ostream& out, const std::vector<SyncFrame>& frames);

}  // namespace qkd
