// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace qkd::cli {

struct SimulateOptions {
  std::string config_path;  // empty -> use the preset
  std::string preset;       // "200km"
  std::string tally_path;   // empty -> stdout
  std::string dump_detections_path;
  std::string dump_plans_path;
  std::string mode = "aggregate";  // or "perpulse"
  std::uint64_t seed = 1;
  std::int64_t per_pulse_cap = 1'000'000'000;
};

struct AnalyzeOptions {
  std::string tally_path;
  std::string report_path;  // empty -> stdout
};

struct ReproduceOptions {
  double n_sigma = -1.0;        // < 0 -> keep the dataset value
  double ec_efficiency = -1.0;  // < 0 -> keep 1.0
};

struct CalibrateOptions {
  std::string tally_path;
  std::string config_path;  // optional baseline hardware parameters
  std::string out_path;     // empty -> stdout
};

int cmd_simulate(const SimulateOptions& options);
int cmd_analyze(const AnalyzeOptions& options);
int cmd_reproduce(const ReproduceOptions& options);
int cmd_calibrate(const CalibrateOptions& options);

}  // namespace qkd::cli
