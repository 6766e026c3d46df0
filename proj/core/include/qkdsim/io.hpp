// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include "qkdsim/decoy_analysis.hpp"
#include "qkdsim/params.hpp"
#include "qkdsim/synchronizer.hpp"
#include "qkdsim/tally.hpp"

namespace qkd::io {

// All files are line-oriented UTF-8 `key = value` text with a `format = 1`
// header; '#' starts a comment. Parse errors name the offending line.

struct SimConfig {
  ProtocolParams params;
  ClockModel clock;
};

// Tally file: the cross-module contract between simulation and analysis.
// Keys: N0, Nmu, Nmup, C0, Cmu, Cmup, Emu, Emup, Lp, Lb, T, f, mu, mup, nsigma.
struct TallyFile {
  Tally tally;
  AnalysisConfig analysis;
  double pulse_rate_hz = 320.0e6;
};

SimConfig read_config(std::istream& in, const std::string& name = "<config>");
SimConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const SimConfig& config);
void write_config_file(const std::string& path, const SimConfig& config);

TallyFile read_tally(std::istream& in, const std::string& name = "<tally>");
TallyFile read_tally_file(const std::string& path);
void write_tally(std::ostream& out, const TallyFile& tally);
void write_tally_file(const std::string& path, const TallyFile& tally);

void write_report(std::ostream& out, const TallyFile& input, const AnalysisResult& result);
void write_report_file(const std::string& path, const TallyFile& input,
                       const AnalysisResult& result);

// Shortest decimal form that round-trips a double.
std::string format_double(double value);

}  // namespace qkd::io
