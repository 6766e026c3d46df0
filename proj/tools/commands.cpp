// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>

#include "qkdsim/decoy_analysis.hpp"
#include "qkdsim/errors.hpp"
#include "qkdsim/io.hpp"
#include "qkdsim/refdata.hpp"
#include "qkdsim/simulation.hpp"

namespace qkd::cli {

namespace {

io::SimConfig load_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty()) {
    return io::read_config_file(config_path);
  }
  if (preset == "200km" || preset.empty()) {
    return io::SimConfig{refdata::reference_params(), ClockModel{}};
  }
  throw ValidationError("unknown preset '" + preset + "' (available: 200km)");
}

std::unique_ptr<std::ofstream> open_optional(const std::string& path) {
  if (path.empty()) return nullptr;
  auto out = std::make_unique<std::ofstream>(path);
  if (!*out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

int cmd_simulate(const SimulateOptions& options) {
  io::SimConfig config = load_config(options.config_path, options.preset);

  SimOptions sim;
  sim.seed = options.seed;
  sim.per_pulse_cap = options.per_pulse_cap;
  if (options.mode == "aggregate") {
    sim.mode = SimMode::Aggregate;
  } else if (options.mode == "perpulse") {
    sim.mode = SimMode::PerPulse;
  } else {
    throw ValidationError("unknown mode '" + options.mode +
                          "' (expected aggregate or perpulse)");
  }
  auto detection_dump = open_optional(options.dump_detections_path);
  auto plan_dump = open_optional(options.dump_plans_path);
  sim.detection_dump = detection_dump.get();
  sim.plan_dump = plan_dump.get();

  SimOutputs outputs = run_simulation(config, sim);

  if (options.tally_path.empty()) {
    io::write_tally(std::cout, outputs.tally_file);
  } else {
    io::write_tally_file(options.tally_path, outputs.tally_file);
  }
  std::cerr << "simulate: " << outputs.detections_total << " detections";
  if (outputs.ambiguous_dropped > 0 || outputs.out_of_range_dropped > 0) {
    std::cerr << " (" << outputs.ambiguous_dropped << " ambiguous, "
              << outputs.out_of_range_dropped << " out-of-range dropped)";
  }
  std::cerr << '\n';
  return 0;
}

int cmd_analyze(const AnalyzeOptions& options) {
  io::TallyFile input = io::read_tally_file(options.tally_path);
  AnalysisResult result = analyze(input.tally, input.analysis);
  if (options.report_path.empty()) {
    io::write_report(std::cout, input, result);
  } else {
    io::write_report_file(options.report_path, input, result);
  }
  // Zero key is a completed analysis; only errors exit nonzero.
  return 0;
}

int cmd_reproduce(const ReproduceOptions& options) {
  io::TallyFile ref = refdata::reference_tally();
  if (options.n_sigma >= 0.0) ref.analysis.n_sigma = options.n_sigma;
  if (options.ec_efficiency >= 0.0) ref.analysis.ec_efficiency = options.ec_efficiency;

  AnalysisResult result = analyze(ref.tally, ref.analysis);

  std::printf("%-14s %14s %14s %11s %9s  %s\n", "quantity", "published",
              "computed", "difference", "limit", "status");
  bool all_pass = true;
  for (const refdata::PublishedValue& row : refdata::published_values()) {
    double computed = refdata::computed_value(result, row.name);
    bool relative = row.rel_tol > 0.0;
    double diff = relative ? std::abs(computed - row.value) / std::abs(row.value)
                           : std::abs(computed - row.value);
    double limit = relative ? row.rel_tol : row.abs_tol;
    bool pass = diff <= limit;
    all_pass = all_pass && pass;
    std::printf("%-14s %14.6g %14.6g %10.3g%s %8.2g%s  %s\n", row.name, row.value,
                computed, relative ? diff * 100.0 : diff, relative ? "%" : " ",
                relative ? limit * 100.0 : limit, relative ? "%" : " ",
                pass ? "PASS" : "FAIL");
  }
  if (!all_pass) {
    std::printf("reproduce: at least one row outside its tolerance\n");
    return static_cast<int>(ErrorCategory::Analysis);
  }
  std::printf("reproduce: all rows within tolerance\n");
  return 0;
}

int cmd_calibrate(const CalibrateOptions& options) {
  io::TallyFile input = io::read_tally_file(options.tally_path);
  ProtocolParams params = options.config_path.empty()
                              ? ProtocolParams{}
                              : io::read_config_file(options.config_path).params;
  params.mu = input.analysis.mu;
  params.mu_prime = input.analysis.mu_prime;
  params.pulse_rate_hz = input.pulse_rate_hz;

  CalibrationResult fit = calibrate_channel(input.tally, params);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!options.out_path.empty()) {
    file.open(options.out_path);
    if (!file) throw IoError("cannot open '" + options.out_path + "' for writing");
    out = &file;
  }
  *out << "format = 1\n";
  *out << "transmittance = " << io::format_double(fit.channel.transmittance) << '\n';
  *out << "misalignment_prob = " << io::format_double(fit.channel.misalignment_prob)
       << '\n';
  *out << "eta_system = " << io::format_double(fit.eta_system) << '\n';
  *out << "extra_loss_db = " << io::format_double(fit.fitted_extra_loss_db) << '\n';
  for (int i = 0; i < kNumDetectors; ++i) {
    *out << "dark_rate_hz_" << i << " = " << io::format_double(fit.dark_rates_hz[i])
         << '\n';
  }
  *out << "model_s_mu = " << io::format_double(fit.model_s_mu) << '\n';
  *out << "residual_s_mu_rel = " << io::format_double(fit.residual_s_mu_rel) << '\n';
  *out << "model_e_mu = " << io::format_double(fit.model_e_mu) << '\n';
  *out << "residual_e_mu_abs = " << io::format_double(fit.residual_e_mu_abs) << '\n';
  return 0;
}

}  // namespace qkd::cli
