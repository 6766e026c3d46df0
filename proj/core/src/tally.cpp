// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/tally.hpp"

#include <string>

#include "qkdsim/errors.hpp"

namespace qkd {

double Tally::counting_rate(IntensityClass c) const {
  int k = static_cast<int>(c);
  if (n_sent[k] <= 0) return 0.0;
  return static_cast<double>(c_received[k]) / static_cast<double>(n_sent[k]);
}

std::vector<ParamViolation> validate_tally(const Tally& t) {
  std::vector<ParamViolation> v;
  for (int k = 0; k < kNumClasses; ++k) {
    std::string cls = to_string(static_cast<IntensityClass>(k));
    if (t.n_sent[k] < 0) {
      v.push_back({"n_sent", "sent count for class " + cls + " must be >= 0"});
    }
    if (t.c_received[k] < 0) {
      v.push_back({"c_received", "click count for class " + cls + " must be >= 0"});
    }
    if (t.c_received[k] > t.n_sent[k]) {
      v.push_back({"c_received",
                   "class " + cls + ": clicks exceed sent pulses (S_k would leave [0,1])"});
    }
    if (t.test_counts[k] < 0) {
      v.push_back({"test_counts", "test count for class " + cls + " must be >= 0"});
    }
    if (k != static_cast<int>(IntensityClass::Vacuum)) {
      if (!(t.e_observed[k] >= 0.0 && t.e_observed[k] <= 0.5)) {
        v.push_back({"e_observed",
                     "QBER for class " + cls + " must lie in [0, 0.5] for analysis"});
      }
    }
  }
  return v;
}

const Tally& validate_tally_or_throw(const Tally& tally) {
  auto violations = validate_tally(tally);
  if (!violations.empty()) {
    throw ValidationError("invalid tally: " + describe(violations));
  }
  return tally;
}

Tally make_tally(const std::array<std::int64_t, kNumClasses>& n_sent,
                 const std::array<std::int64_t, kNumClasses>& c_received,
                 const std::array<double, kNumClasses>& e_observed,
                 const std::array<std::int64_t, kNumClasses>& test_counts) {
  Tally t{n_sent, c_received, e_observed, test_counts};
  validate_tally_or_throw(t);
  return t;
}

}  // namespace qkd
