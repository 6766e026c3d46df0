// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/params.hpp"

#include <cmath>
#include <sstream>

#include "qkdsim/errors.hpp"

namespace qkd {

const char* to_string(IntensityClass c) {
  switch (c) {
    case IntensityClass::Vacuum: return "V";
    case IntensityClass::Decoy: return "D";
    case IntensityClass::Signal: return "S";
  }
  return "?";
}

const char* to_string(Polarization p) {
  switch (p) {
    case Polarization::H: return "H";
    case Polarization::V: return "V";
    case Polarization::D: return "D";
    case Polarization::A: return "A";
  }
  return "?";
}

const char* to_string(Basis b) {
  return b == Basis::Rectilinear ? "R" : "D";
}

double ProtocolParams::intensity_of(IntensityClass c) const {
  switch (c) {
    case IntensityClass::Vacuum: return 0.0;
    case IntensityClass::Decoy: return mu;
    case IntensityClass::Signal: return mu_prime;
  }
  return 0.0;
}

std::int64_t ProtocolParams::slots_per_block() const {
  return static_cast<std::int64_t>(std::llround(pulse_rate_hz / sync_rate_hz));
}

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

std::vector<ParamViolation> validate_params(const ProtocolParams& p) {
  std::vector<ParamViolation> v;
  auto fail = [&v](std::string field, std::string description) {
    v.push_back({std::move(field), std::move(description)});
  };

  if (!(p.mu > 0.0)) {
    fail("mu", "decoy intensity mu must be > 0");
  }
  if (!(p.mu < p.mu_prime)) {
    fail("mu", "mu must be < mu_prime");
  }
  if (!(p.mu_prime > 0.0)) {
    fail("mu_prime", "signal intensity mu_prime must be > 0");
  }

  double prob_sum = p.class_probs[0] + p.class_probs[1] + p.class_probs[2];
  if (std::abs(prob_sum - 1.0) > 1e-12) {
    fail("class_probs", "probabilities must sum to 1");
  }
  for (int i = 0; i < kNumClasses; ++i) {
    if (!(p.class_probs[i] > 0.0)) {
      fail("class_probs", std::string("probability of class ") +
                              std::to_string(i) + " must be > 0");
    }
  }

  if (!(p.pulse_rate_hz > 0.0)) {
    fail("pulse_rate_hz", "pulse rate must be > 0");
  }
  if (!(p.sync_rate_hz > 0.0)) {
    fail("sync_rate_hz", "sync rate must be > 0");
  } else if (p.pulse_rate_hz > 0.0) {
    double ratio = p.pulse_rate_hz / p.sync_rate_hz;
    if (ratio < 1.0 || std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio) {
      fail("sync_rate_hz", "pulse_rate_hz must be an integer multiple of sync_rate_hz");
    }
  }

  if (p.fiber_length_km < 0.0) fail("fiber_length_km", "length must be >= 0");
  if (p.atten_db_per_km < 0.0) fail("atten_db_per_km", "attenuation must be >= 0");
  if (p.extra_loss_db < 0.0) fail("extra_loss_db", "extra loss must be >= 0");

  for (int i = 0; i < kNumDetectors; ++i) {
    if (!in_unit_interval(p.detector_efficiencies[i])) {
      fail("detector_efficiencies",
           "efficiency of detector " + std::to_string(i) + " must be in [0,1]");
    }
    if (p.dark_rates_hz[i] < 0.0) {
      fail("dark_rates_hz",
           "dark rate of detector " + std::to_string(i) + " must be >= 0");
    }
  }

  if (!in_unit_interval(p.misalignment_prob)) {
    fail("misalignment_prob", "misalignment probability must be in [0,1]");
  }
  if (p.n_sigma < 0.0) fail("n_sigma", "fluctuation multiplier must be >= 0");

  if (!in_unit_interval(p.test_fraction_phase)) {
    fail("test_fraction_phase", "phase-test fraction must be in [0,1]");
  }
  if (!in_unit_interval(p.test_fraction_bit)) {
    fail("test_fraction_bit", "bit-test fraction must be in [0,1]");
  }
  if (!(p.test_fraction_phase + p.test_fraction_bit < 1.0)) {
    fail("test_fraction_phase", "test_fraction_phase + test_fraction_bit must be < 1");
  }

  if (!(p.duration_s > 0.0)) fail("duration_s", "duration must be > 0");
  if (p.total_pulses < 0) fail("total_pulses", "total pulses must be >= 0");
  if (!(p.ec_efficiency >= 1.0)) fail("ec_efficiency", "ec_efficiency must be >= 1");

  return v;
}

std::string describe(const std::vector<ParamViolation>& violations) {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) os << "; ";
    os << violations[i].field << ": " << violations[i].description;
  }
  return os.str();
}

const ProtocolParams& validate_params_or_throw(const ProtocolParams& params) {
  auto violations = validate_params(params);
  if (!violations.empty()) {
    throw ValidationError("invalid parameters: " + describe(violations));
  }
  return params;
}

}  // namespace qkd
