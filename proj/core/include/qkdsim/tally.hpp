// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qkdsim/params.hpp"

namespace qkd {

// Aggregate observed statistics of one run.
//
// c_received[k] counts every slot of class k on which any detector clicked,
// before basis reconciliation. The counting rates S_k = C_k / N_k therefore
// measure the per-emitted-pulse click probability; the factor-1/2 basis loss
// is charged explicitly in the final key accounting. QBER values are measured
// on the basis-matched subset.
struct Tally {
  std::array<std::int64_t, kNumClasses> n_sent{};      // N0, Nmu, Nmu'
  std::array<std::int64_t, kNumClasses> c_received{};  // C0, Cmu, Cmu'
  std::array<double, kNumClasses> e_observed{};        // QBER; unused for Vacuum
  std::array<std::int64_t, kNumClasses> test_counts{}; // test bits consumed

  // S_k = C_k / N_k.
  double counting_rate(IntensityClass c) const;
};

// Complete list of invariant violations (empty when valid).
std::vector<ParamViolation> validate_tally(const Tally& tally);

// Throws ValidationError naming every violated invariant; returns its argument.
const Tally& validate_tally_or_throw(const Tally& tally);

// Checked constructor used where a violating instance must not exist.
Tally make_tally(const std::array<std::int64_t, kNumClasses>& n_sent,
                 const std::array<std::int64_t, kNumClasses>& c_received,
                 const std::array<double, kNumClasses>& e_observed,
                 const std::array<std::int64_t, kNumClasses>& test_counts);

}  // namespace qkd
