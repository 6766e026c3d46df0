// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "qkdsim/io.hpp"
#include "qkdsim/params.hpp"
#include "qkdsim/transmission.hpp"

namespace qkd::refdata {

// Bundled reference dataset: a 200 km fiber run at 320 MHz with
// superconducting detectors, 3089 s, 9.8848e11 pulses split 1:1:2 over
// vacuum/decoy/signal. Used by the `reproduce` command and the regression
// suite.

// Observed counts and QBERs of the reference run.
io::TallyFile reference_tally();

// Hardware parameters with the channel calibrated against the reference
// tally: dark rates reproduce S0, transmittance reproduces S_mu', and the
// misalignment reproduces E_mu'.
ProtocolParams reference_params();

CalibrationResult reference_calibration();

// One published analysis value with its regression tolerance. Exactly one of
// rel_tol / abs_tol is positive.
struct PublishedValue {
  const char* name;
  double value;
  double rel_tol;
  double abs_tol;
};

std::span<const PublishedValue> published_values();

// Computed counterpart of a published row, by name.
double computed_value(const AnalysisResult& result, const char* name);

}  // namespace qkd::refdata
