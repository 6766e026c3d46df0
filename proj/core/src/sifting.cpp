// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/sifting.hpp"

#include <string>
#include <unordered_map>

#include "qkdsim/errors.hpp"

namespace qkd {

SiftResult sift(const PlanSource& plans, const std::vector<DetectionRecord>& detections) {
  SiftResult result;
  for (const DetectionRecord& det : detections) {
    if (det.outcome == OutcomeKind::NoClick) continue;
    std::optional<PulsePlan> plan = plans(det.slot_index);
    if (!plan.has_value()) {
      throw ValidationError("sift: UnknownSlot, detection at slot " +
                            std::to_string(det.slot_index) + " references no plan");
    }
    int k = static_cast<int>(plan->cls);
    ++result.clicks[k];

    if (plan->cls == IntensityClass::Vacuum) {
      result.bits.push_back({det.slot_index, plan->cls, std::nullopt,
                             detector_bit(det.detector), BitRole::KeyCandidate});
      ++result.kept[k];
      continue;
    }
    if (det.basis_chosen != basis_of(*plan->polarization)) {
      ++result.discarded_mismatch;
      continue;
    }
    result.bits.push_back({det.slot_index, plan->cls, bit_of(*plan->polarization),
                           detector_bit(det.detector), BitRole::KeyCandidate});
    ++result.kept[k];
  }
  return result;
}

SiftResult sift(const std::vector<PulsePlan>& plans,
                const std::vector<DetectionRecord>& detections) {
  std::unordered_map<std::int64_t, const PulsePlan*> by_slot;
  by_slot.reserve(plans.size());
  for (const PulsePlan& plan : plans) {
    by_slot.emplace(plan.slot_index, &plan);
  }
  return sift(
      [&by_slot](std::int64_t slot) -> std::optional<PulsePlan> {
        auto it = by_slot.find(slot);
        if (it == by_slot.end()) return std::nullopt;
        return *it->second;
      },
      detections);
}

void sample_test_bits(std::vector<SiftedBit>& bits, double lp, double lb,
                      const rng::Stream& test_stream) {
  if (lp < 0.0 || lb < 0.0 || lp + lb >= 1.0 + 1e-12) {
    throw ValidationError("sample_test_bits: test fractions must satisfy lp + lb < 1");
  }
  for (SiftedBit& bit : bits) {
    if (bit.cls == IntensityClass::Vacuum) continue;
    double u = rng::to_unit(
        test_stream.block(static_cast<std::uint64_t>(bit.slot_index))[0]);
    if (u < lp) {
      bit.role = BitRole::PhaseTest;
    } else if (u < lp + lb) {
      bit.role = BitRole::BitTest;
    } else {
      bit.role = BitRole::KeyCandidate;
    }
  }
}

std::array<std::array<std::int64_t, 3>, kNumClasses> count_roles(
    const std::vector<SiftedBit>& bits) {
  std::array<std::array<std::int64_t, 3>, kNumClasses> counts{};
  for (const SiftedBit& bit : bits) {
    ++counts[static_cast<int>(bit.cls)][static_cast<int>(bit.role)];
  }
  return counts;
}

Tally build_tally(const SiftResult& sifted,
                  const std::array<std::int64_t, kNumClasses>& sent_counts,
                  QberSource decoy_source, QberSource signal_source) {
  Tally tally;
  tally.n_sent = sent_counts;
  tally.c_received = sifted.clicks;

  auto source_for = [&](IntensityClass cls) {
    return cls == IntensityClass::Decoy ? decoy_source : signal_source;
  };

  std::array<std::int64_t, kNumClasses> inspected{};
  std::array<std::int64_t, kNumClasses> errors{};
  for (const SiftedBit& bit : sifted.bits) {
    if (bit.cls == IntensityClass::Vacuum) continue;
    bool counted = source_for(bit.cls) == QberSource::AllBits
                       ? true
                       : bit.role == BitRole::PhaseTest;
    if (!counted) continue;
    int k = static_cast<int>(bit.cls);
    ++inspected[k];
    if (bit.alice_bit.has_value() && *bit.alice_bit != bit.bob_bit) ++errors[k];
  }

  for (int k = 1; k < kNumClasses; ++k) {
    if (inspected[k] == 0) {
      if (sifted.kept[k] > 0) {
        throw AnalysisError(
            std::string("build_tally: EmptyTestSet, no test bits for class ") +
            to_string(static_cast<IntensityClass>(k)));
      }
      tally.e_observed[k] = 0.0;
    } else {
      tally.e_observed[k] =
          static_cast<double>(errors[k]) / static_cast<double>(inspected[k]);
    }
    tally.test_counts[k] = inspected[k];
  }
  return validate_tally_or_throw(tally);
}

}  // namespace qkd
