// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "qkdsim/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Decoy-state BB84 simulator and security analyzer"};
  app.require_subcommand(1);

  qkd::cli::SimulateOptions simulate;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the pulse/channel/sync/sifting pipeline and write a tally");
  sim->add_option("--config", simulate.config_path, "Parameter file (key = value)");
  sim->add_option("--preset", simulate.preset, "Built-in parameter set (200km)");
  sim->add_option("--tally", simulate.tally_path, "Output tally file (default stdout)");
  sim->add_option("--seed", simulate.seed, "RNG seed");
  sim->add_option("--mode", simulate.mode, "perpulse or aggregate")
      ->check(CLI::IsMember({"perpulse", "aggregate"}));
  sim->add_option("--dump-detections", simulate.dump_detections_path,
                  "CSV dump of detection records (perpulse mode)");
  sim->add_option("--dump-plans", simulate.dump_plans_path,
                  "CSV dump of emitted pulse plans (perpulse mode)");
  sim->add_option("--per-pulse-cap", simulate.per_pulse_cap,
                  "Largest N accepted in perpulse mode");

  qkd::cli::AnalyzeOptions analyze;
  CLI::App* ana = app.add_subcommand(
      "analyze", "Run the decoy-state security analysis on a tally file");
  ana->add_option("--tally", analyze.tally_path, "Input tally file")->required();
  ana->add_option("--report", analyze.report_path, "Output report file (default stdout)");

  qkd::cli::ReproduceOptions reproduce;
  CLI::App* rep = app.add_subcommand(
      "reproduce", "Check the analyzer against the bundled 200 km dataset");
  rep->add_option("--n-sigma", reproduce.n_sigma, "Override the fluctuation multiplier");
  rep->add_option("--ec-efficiency", reproduce.ec_efficiency,
                  "Override the error-correction inefficiency");

  qkd::cli::CalibrateOptions calibrate;
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Fit channel loss and misalignment against a tally file");
  cal->add_option("--tally", calibrate.tally_path, "Input tally file")->required();
  cal->add_option("--config", calibrate.config_path, "Baseline hardware parameters");
  cal->add_option("--out", calibrate.out_path, "Output parameter file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return qkd::cli::cmd_simulate(simulate);
    if (ana->parsed()) return qkd::cli::cmd_analyze(analyze);
    if (rep->parsed()) return qkd::cli::cmd_reproduce(reproduce);
    if (cal->parsed()) return qkd::cli::cmd_calibrate(calibrate);
  } catch (const qkd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
