// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qkdsim/params.hpp"
#include "qkdsim/pulse_source.hpp"
#include "qkdsim/rng.hpp"
#include "qkdsim/tally.hpp"
#include "qkdsim/transmission.hpp"

namespace qkd {

enum class BitRole : std::uint8_t { KeyCandidate = 0, PhaseTest = 1, BitTest = 2 };

// One reconciled detection. Vacuum-class clicks are kept for the dark-rate
// tally but carry no sender bit and never enter the key.
struct SiftedBit {
  std::int64_t slot_index = 0;
  IntensityClass cls = IntensityClass::Vacuum;
  std::optional<int> alice_bit;  // absent for vacuum
  int bob_bit = 0;
  BitRole role = BitRole::KeyCandidate;
};

struct SiftResult {
  std::vector<SiftedBit> bits;  // basis-matched detections plus all vacuum clicks
  // Every click per class, including basis mismatches: the C_k counts.
  std::array<std::int64_t, kNumClasses> clicks{};
  // Entries of `bits` per class.
  std::array<std::int64_t, kNumClasses> kept{};
  std::int64_t discarded_mismatch = 0;
};

using PlanSource = std::function<std::optional<PulsePlan>(std::int64_t)>;

// Reconciles detections against the sender's pulse plans. Non-vacuum
// detections are kept when the resolved detector's basis equals the plan's
// polarization basis; vacuum detections are always kept. Throws
// ValidationError (UnknownSlot) when a detection references no plan.
SiftResult sift(const PlanSource& plans, const std::vector<DetectionRecord>& detections);
SiftResult sift(const std::vector<PulsePlan>& plans,
                const std::vector<DetectionRecord>& detections);

// Assigns roles to non-vacuum bits by independent per-bit draws: PhaseTest
// with probability lp, BitTest with lb, KeyCandidate otherwise. Draws are
// addressed by slot index in `test_stream`.
void sample_test_bits(std::vector<SiftedBit>& bits, double lp, double lb,
                      const rng::Stream& test_stream);

std::array<std::array<std::int64_t, 3>, kNumClasses> count_roles(
    const std::vector<SiftedBit>& bits);

// Which bits feed the QBER estimate of a class.
enum class QberSource : std::uint8_t { PhaseTestOnly = 0, AllBits = 1 };

// Builds the tally: N_k from sent counts, C_k from the per-class click
// counts, E_k from the selected subset of sifted bits. Throws AnalysisError
// (EmptyTestSet) when a non-vacuum class has clicks but an empty estimating
// subset.
Tally build_tally(const SiftResult& sifted,
                  const std::array<std::int64_t, kNumClasses>& sent_counts,
                  QberSource decoy_source = QberSource::AllBits,
                  QberSource signal_source = QberSource::PhaseTestOnly);

}  // namespace qkd
