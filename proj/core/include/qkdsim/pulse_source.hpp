// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "qkdsim/params.hpp"
#include "qkdsim/rng.hpp"

namespace qkd {

// One emitted pulse: what Alice chose for a slot.
struct PulsePlan {
  std::int64_t slot_index = 0;
  IntensityClass cls = IntensityClass::Vacuum;
  std::optional<Polarization> polarization;  // absent iff vacuum
  double intensity = 0.0;
};

// Checked constructor enforcing the class/intensity/polarization rules.
PulsePlan make_pulse_plan(const ProtocolParams& params, std::int64_t slot_index,
                          IntensityClass cls, std::optional<Polarization> pol);

// 4-bit encoding of one pulse. High two bits: 00 vacuum, 01 decoy,
// 10 or 11 signal. Low two bits pick the state: 00 H, 01 V, 10 D, 11 A
// (ignored for vacuum). Total on nibble values 0..15.
PulsePlan encode_pulse(const ProtocolParams& params, std::int64_t slot_index,
                       unsigned nibble);

// Reproducible pulse stream: identical (seed, block_index) always yields the
// identical block, and blocks can be generated independently in any order.
//
// With the canonical 1/4:1/4:1/2 class split, pulses come from i.i.d. uniform
// 4-bit numbers (64 nibbles per generator block). Other splits fall back to a
// general per-slot draw against the cumulative class probabilities.
class SourceStream {
 public:
  SourceStream(const ProtocolParams& params, std::uint64_t seed,
               std::int64_t block_size);

  std::int64_t block_size() const { return block_size_; }
  bool uses_nibble_encoding() const { return nibble_path_; }

  unsigned nibble_at(std::int64_t slot_index) const;
  PulsePlan plan_at(std::int64_t slot_index) const;

  std::vector<PulsePlan> generate_block(std::int64_t block_index) const;

 private:
  const ProtocolParams* params_;
  rng::Stream stream_;
  std::int64_t block_size_;
  bool nibble_path_;
};

struct ClassHistogram {
  std::array<std::int64_t, kNumClasses> per_class{};
  // [class][polarization]; vacuum row stays zero.
  std::array<std::array<std::int64_t, 4>, kNumClasses> per_polarization{};
  std::int64_t total = 0;
};

ClassHistogram class_histogram(std::span<const PulsePlan> plans);

// One record per line: slot_index,class,polarization with class in {V,D,S}
// and polarization in {H,V,D,A,-}.
void write_plan_dump(std::ostream& out, std::span<const PulsePlan> plans);

}  // namespace qkd
