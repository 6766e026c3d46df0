// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "qkdsim/errors.hpp"

namespace qkd::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct KeyValueFile {
  std::string name;
  std::map<std::string, std::pair<std::string, int>> entries;  // value, line

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw IoError(name + ":" + std::to_string(line) + ": " + message);
  }

  const std::pair<std::string, int>& require(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) {
      throw IoError(name + ": missing required key '" + key + "'");
    }
    return it->second;
  }

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  double get_double(const std::string& key) const {
    const auto& [text, line] = require(key);
    try {
      std::size_t consumed = 0;
      double value = std::stod(text, &consumed);
      if (consumed != text.size()) fail(line, "trailing characters in value '" + text + "'");
      return value;
    } catch (const std::logic_error&) {
      fail(line, "expected a number for '" + key + "', got '" + text + "'");
    }
  }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::int64_t get_int(const std::string& key) const {
    const auto& [text, line] = require(key);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      // Counts may legitimately arrive in scientific notation.
      double as_double = get_double(key);
      value = static_cast<std::int64_t>(std::llround(as_double));
      if (std::abs(as_double - static_cast<double>(value)) > 0.5) {
        fail(line, "expected an integer for '" + key + "'");
      }
    }
    return value;
  }
};

KeyValueFile parse_key_values(std::istream& in, const std::string& name,
                              const std::vector<std::string>& known_keys) {
  KeyValueFile file;
  file.name = name;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string content = trim(line.substr(0, line.find('#')));
    if (content.empty()) continue;
    std::size_t eq = content.find('=');
    if (eq == std::string::npos) {
      file.fail(line_no, "expected 'key = value', got '" + content + "'");
    }
    std::string key = trim(content.substr(0, eq));
    std::string value = trim(content.substr(eq + 1));
    if (key.empty() || value.empty()) {
      file.fail(line_no, "expected 'key = value', got '" + content + "'");
    }
    bool known = false;
    for (const auto& k : known_keys) {
      if (k == key) {
        known = true;
        break;
      }
    }
    if (!known) file.fail(line_no, "unknown key '" + key + "'");
    if (file.entries.count(key)) file.fail(line_no, "duplicate key '" + key + "'");
    file.entries[key] = {value, line_no};
  }
  if (file.has("format")) {
    const auto& [text, line] = file.require("format");
    if (text != "1") file.fail(line, "unsupported format version '" + text + "'");
  }
  return file;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

const std::vector<std::string> kConfigKeys = {
    "format", "mu", "mu_prime", "p_vacuum", "p_decoy", "p_signal",
    "pulse_rate_hz", "sync_rate_hz", "fiber_length_km", "atten_db_per_km",
    "extra_loss_db", "det_eff_0", "det_eff_1", "det_eff_2", "det_eff_3",
    "dark_rate_hz_0", "dark_rate_hz_1", "dark_rate_hz_2", "dark_rate_hz_3",
    "misalignment_prob", "n_sigma", "test_fraction_phase", "test_fraction_bit",
    "duration_s", "total_pulses", "ec_efficiency",
    "clock_drift_ppm", "clock_jitter_s", "clock_offset_s"};

const std::vector<std::string> kTallyKeys = {
    "format", "N0", "Nmu", "Nmup", "C0", "Cmu", "Cmup",
    "Emu", "Emup", "Lp", "Lb", "T", "f", "mu", "mup", "nsigma"};

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  std::string best = buffer;
  // Shortest decimal form that round-trips.
  for (int precision = 1; precision < 17; ++precision) {
    char candidate[40];
    std::snprintf(candidate, sizeof(candidate), "%.*g", precision, value);
    if (std::stod(candidate) == value && std::strlen(candidate) < best.size()) {
      best = candidate;
    }
  }
  return best;
}

SimConfig read_config(std::istream& in, const std::string& name) {
  KeyValueFile f = parse_key_values(in, name, kConfigKeys);
  SimConfig config;
  ProtocolParams& p = config.params;
  p.mu = f.get_double("mu");
  p.mu_prime = f.get_double("mu_prime");
  p.class_probs = {f.get_double("p_vacuum"), f.get_double("p_decoy"),
                   f.get_double("p_signal")};
  p.pulse_rate_hz = f.get_double("pulse_rate_hz");
  p.sync_rate_hz = f.get_double("sync_rate_hz");
  p.fiber_length_km = f.get_double("fiber_length_km");
  p.atten_db_per_km = f.get_double("atten_db_per_km");
  p.extra_loss_db = f.get_double("extra_loss_db");
  for (int i = 0; i < kNumDetectors; ++i) {
    p.detector_efficiencies[i] = f.get_double("det_eff_" + std::to_string(i));
    p.dark_rates_hz[i] = f.get_double("dark_rate_hz_" + std::to_string(i));
  }
  p.misalignment_prob = f.get_double("misalignment_prob");
  p.n_sigma = f.get_double("n_sigma");
  p.test_fraction_phase = f.get_double("test_fraction_phase");
  p.test_fraction_bit = f.get_double("test_fraction_bit");
  p.duration_s = f.get_double("duration_s");
  p.total_pulses = f.get_int("total_pulses");
  p.ec_efficiency = f.get_double("ec_efficiency");
  config.clock.drift_ppm = f.get_double_or("clock_drift_ppm", 0.0);
  config.clock.jitter_s = f.get_double_or("clock_jitter_s", 0.0);
  config.clock.offset_s = f.get_double_or("clock_offset_s", 0.0);
  return config;
}

SimConfig read_config_file(const std::string& path) {
  auto in = open_input(path);
  return read_config(in, path);
}

void write_config(std::ostream& out, const SimConfig& config) {
  const ProtocolParams& p = config.params;
  out << "format = 1\n";
  out << "mu = " << format_double(p.mu) << '\n';
  out << "mu_prime = " << format_double(p.mu_prime) << '\n';
  out << "p_vacuum = " << format_double(p.class_probs[0]) << '\n';
  out << "p_decoy = " << format_double(p.class_probs[1]) << '\n';
  out << "p_signal = " << format_double(p.class_probs[2]) << '\n';
  out << "pulse_rate_hz = " << format_double(p.pulse_rate_hz) << '\n';
  out << "sync_rate_hz = " << format_double(p.sync_rate_hz) << '\n';
  out << "fiber_length_km = " << format_double(p.fiber_length_km) << '\n';
  out << "atten_db_per_km = " << format_double(p.atten_db_per_km) << '\n';
  out << "extra_loss_db = " << format_double(p.extra_loss_db) << '\n';
  for (int i = 0; i < kNumDetectors; ++i) {
    out << "det_eff_" << i << " = " << format_double(p.detector_efficiencies[i]) << '\n';
  }
  for (int i = 0; i < kNumDetectors; ++i) {
    out << "dark_rate_hz_" << i << " = " << format_double(p.dark_rates_hz[i]) << '\n';
  }
  out << "misalignment_prob = " << format_double(p.misalignment_prob) << '\n';
  out << "n_sigma = " << format_double(p.n_sigma) << '\n';
  out << "test_fraction_phase = " << format_double(p.test_fraction_phase) << '\n';
  out << "test_fraction_bit = " << format_double(p.test_fraction_bit) << '\n';
  out << "duration_s = " << format_double(p.duration_s) << '\n';
  out << "total_pulses = " << p.total_pulses << '\n';
  out << "ec_efficiency = " << format_double(p.ec_efficiency) << '\n';
  out << "clock_drift_ppm = " << format_double(config.clock.drift_ppm) << '\n';
  out << "clock_jitter_s = " << format_double(config.clock.jitter_s) << '\n';
  out << "clock_offset_s = " << format_double(config.clock.offset_s) << '\n';
}

void write_config_file(const std::string& path, const SimConfig& config) {
  auto out = open_output(path);
  write_config(out, config);
}

TallyFile read_tally(std::istream& in, const std::string& name) {
  KeyValueFile f = parse_key_values(in, name, kTallyKeys);
  TallyFile t;
  t.tally.n_sent = {f.get_int("N0"), f.get_int("Nmu"), f.get_int("Nmup")};
  t.tally.c_received = {f.get_int("C0"), f.get_int("Cmu"), f.get_int("Cmup")};
  t.tally.e_observed = {0.0, f.get_double("Emu"), f.get_double("Emup")};
  t.analysis.mu = f.get_double("mu");
  t.analysis.mu_prime = f.get_double("mup");
  t.analysis.test_fraction_phase = f.get_double("Lp");
  t.analysis.test_fraction_bit = f.get_double("Lb");
  t.analysis.n_sigma = f.get_double("nsigma");
  t.analysis.duration_s = f.get_double("T");
  t.pulse_rate_hz = f.get_double("f");
  return t;
}

TallyFile read_tally_file(const std::string& path) {
  auto in = open_input(path);
  return read_tally(in, path);
}

void write_tally(std::ostream& out, const TallyFile& t) {
  out << "format = 1\n";
  out << "N0 = " << t.tally.n_sent[0] << '\n';
  out << "Nmu = " << t.tally.n_sent[1] << '\n';
  out << "Nmup = " << t.tally.n_sent[2] << '\n';
  out << "C0 = " << t.tally.c_received[0] << '\n';
  out << "Cmu = " << t.tally.c_received[1] << '\n';
  out << "Cmup = " << t.tally.c_received[2] << '\n';
  out << "Emu = " << format_double(t.tally.e_observed[1]) << '\n';
  out << "Emup = " << format_double(t.tally.e_observed[2]) << '\n';
  out << "Lp = " << format_double(t.analysis.test_fraction_phase) << '\n';
  out << "Lb = " << format_double(t.analysis.test_fraction_bit) << '\n';
  out << "T = " << format_double(t.analysis.duration_s) << '\n';
  out << "f = " << format_double(t.pulse_rate_hz) << '\n';
  out << "mu = " << format_double(t.analysis.mu) << '\n';
  out << "mup = " << format_double(t.analysis.mu_prime) << '\n';
  out << "nsigma = " << format_double(t.analysis.n_sigma) << '\n';
}

void write_tally_file(const std::string& path, const TallyFile& tally) {
  auto out = open_output(path);
  write_tally(out, tally);
}

void write_report(std::ostream& out, const TallyFile& input, const AnalysisResult& r) {
  const SecurityBounds& b = r.bounds;
  const SecurityReport& rep = r.report;
  out << "format = 1\n";
  out << "S0 = " << format_double(input.tally.counting_rate(IntensityClass::Vacuum)) << '\n';
  out << "Smu = " << format_double(input.tally.counting_rate(IntensityClass::Decoy)) << '\n';
  out << "Smup = " << format_double(input.tally.counting_rate(IntensityClass::Signal)) << '\n';
  out << "r0 = " << format_double(b.r0) << '\n';
  out << "s0_low = " << format_double(b.s0_low) << '\n';
  out << "s0_high = " << format_double(b.s0_high) << '\n';
  out << "Emu_U = " << format_double(b.e_u_mu) << '\n';
  out << "Emup_U = " << format_double(b.e_u_mup) << '\n';
  out << "s1 = " << format_double(b.s1) << '\n';
  out << "s1_prime = " << format_double(b.s1_prime) << '\n';
  out << "s_c = " << format_double(b.s_c) << '\n';
  out << "delta1_mu = " << format_double(b.delta1_mu) << '\n';
  out << "delta1_mup = " << format_double(b.delta1_mup) << '\n';
  out << "E1_mu = " << format_double(b.e1_mu) << '\n';
  out << "E1_mup = " << format_double(b.e1_mup) << '\n';
  out << "R_mu = " << format_double(rep.r_mu) << '\n';
  out << "R_mup = " << format_double(rep.r_mup) << '\n';
  out << "K_mu = " << format_double(rep.k_mu) << '\n';
  out << "K_mup = " << format_double(rep.k_mup) << '\n';
  out << "K_mu_per_s = " << format_double(rep.rate_mu_hz) << '\n';
  out << "K_mup_per_s = " << format_double(rep.rate_mup_hz) << '\n';
  out << "rate_total_hz = " << format_double(rep.rate_total_hz) << '\n';
  out << "clamped_R_mu = " << (rep.clamped_r_mu ? 1 : 0) << '\n';
  out << "clamped_R_mup = " << (rep.clamped_r_mup ? 1 : 0) << '\n';
  out << "clamped_E1_mu = " << (rep.clamped_e1_mu ? 1 : 0) << '\n';
  out << "clamped_E1_mup = " << (rep.clamped_e1_mup ? 1 : 0) << '\n';
  out << "solver_iterations_decoy = " << r.solver_iterations_decoy << '\n';
  out << "solver_iterations_signal = " << r.solver_iterations_signal << '\n';
  out << "residual_decoy = " << format_double(r.residual_decoy) << '\n';
  out << "residual_signal = " << format_double(r.residual_signal) << '\n';
  if (!r.note_mu.empty()) out << "# decoy branch: " << r.note_mu << '\n';
  if (!r.note_mup.empty()) out << "# signal branch: " << r.note_mup << '\n';
}

void write_report_file(const std::string& path, const TallyFile& input,
                       const AnalysisResult& result) {
  auto out = open_output(path);
  write_report(out, input, result);
}

}  // namespace qkd::io
