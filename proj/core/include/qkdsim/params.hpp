// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qkd {

inline constexpr int kNumDetectors = 4;
inline constexpr int kNumClasses = 3;

// Pulse intensity class: vacuum (0), decoy (mu) or signal (mu').
enum class IntensityClass : std::uint8_t { Vacuum = 0, Decoy = 1, Signal = 2 };

enum class Basis : std::uint8_t { Rectilinear = 0, Diagonal = 1 };

// The four BB84 polarization states. H/V span the rectilinear basis,
// D (pi/4) and A (3pi/4) the diagonal one.
enum class Polarization : std::uint8_t { H = 0, V = 1, D = 2, A = 3 };

constexpr Basis basis_of(Polarization p) {
  return (p == Polarization::H || p == Polarization::V) ? Basis::Rectilinear
                                                        : Basis::Diagonal;
}

constexpr int bit_of(Polarization p) {
  return (p == Polarization::V || p == Polarization::A) ? 1 : 0;
}

constexpr Polarization partner_of(Polarization p) {
  return static_cast<Polarization>(static_cast<int>(p) ^ 1);
}

// Detector i fires on exactly one polarization: 0:H 1:V 2:D 3:A.
constexpr int detector_for(Polarization p) { return static_cast<int>(p); }
constexpr Basis detector_basis(int detector) {
  return detector < 2 ? Basis::Rectilinear : Basis::Diagonal;
}
constexpr int detector_bit(int detector) { return detector & 1; }

const char* to_string(IntensityClass c);
const char* to_string(Polarization p);
const char* to_string(Basis b);

// All physical and protocol constants of one run. Counts are 64-bit because
// runs reach ~1e12 emitted pulses.
struct ProtocolParams {
  double mu = 0.2;        // decoy mean photon number
  double mu_prime = 0.6;  // signal mean photon number
  // Emission probabilities (vacuum, decoy, signal). The 4-bit encoding of the
  // transmitter fixes these to 1/4 : 1/4 : 1/2; other splits are supported by
  // the general sampling path.
  std::array<double, kNumClasses> class_probs{0.25, 0.25, 0.5};
  double pulse_rate_hz = 320.0e6;  // system clock f
  double sync_rate_hz = 40.0e3;    // synchronization pulse frequency
  double fiber_length_km = 200.0;
  double atten_db_per_km = 0.2;
  double extra_loss_db = 0.0;  // lumped insertion/connector loss
  std::array<double, kNumDetectors> detector_efficiencies{0.04, 0.04, 0.04, 0.03};
  std::array<double, kNumDetectors> dark_rates_hz{1.0, 1.0, 1.0, 1.0};
  double misalignment_prob = 0.0;  // wrong-detector probability in the matched basis
  double n_sigma = 10.0;           // statistical fluctuation multiplier
  double test_fraction_phase = 0.10;  // L^p
  double test_fraction_bit = 0.05;    // L^b
  double duration_s = 3089.0;         // T
  std::int64_t total_pulses = 988'480'000'000;  // N
  double ec_efficiency = 1.0;  // error-correction inefficiency factor, >= 1

  double intensity_of(IntensityClass c) const;
  // pulse_rate_hz / sync_rate_hz, validated to be a positive integer.
  std::int64_t slots_per_block() const;
};

struct ParamViolation {
  std::string field;
  std::string description;
};

// Checks every invariant and returns the complete list of violations
// (empty when the parameters are valid).
std::vector<ParamViolation> validate_params(const ProtocolParams& params);

// Throws ValidationError listing every violation; returns its argument.
const ProtocolParams& validate_params_or_throw(const ProtocolParams& params);

std::string describe(const std::vector<ParamViolation>& violations);

}  // namespace qkd
