// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qkdsim/params.hpp"
#include "qkdsim/pulse_source.hpp"
#include "qkdsim/rng.hpp"
#include "qkdsim/sampling.hpp"
#include "qkdsim/tally.hpp"

namespace qkd {

// End-to-end optical path, detector efficiencies excluded.
struct ChannelModel {
  double transmittance = 1.0;      // probability a photon reaches a detector input
  double misalignment_prob = 0.0;  // wrong-detector probability within the matched basis
};

// 10^-(L*alpha + extra)/10 with the misalignment taken from the parameters.
ChannelModel channel_from_params(const ProtocolParams& params);

// Per-detector overall efficiency eta_i = transmittance * detector_efficiency_i.
std::array<double, kNumDetectors> system_transmittance(const ProtocolParams& params);

enum class OutcomeKind : std::uint8_t { NoClick = 0, Click = 1, DoubleClick = 2 };

struct DetectionRecord {
  std::int64_t slot_index = 0;
  Basis basis_chosen = Basis::Rectilinear;  // basis of the resolved detector
  OutcomeKind outcome = OutcomeKind::NoClick;
  int detector = -1;  // resolved detector for Click/DoubleClick
  double timestamp_s = 0.0;
};

// Exact per-slot click statistics for one intensity class, marginalized over
// Alice's state, Bob's passive basis, the misalignment swap and dark counts.
struct ClassStatistics {
  double p_click = 0.0;         // any detector clicked (counts into C_k)
  double p_sifted = 0.0;        // resolved detector lies in Alice's basis
                                //   (vacuum slots: every click is kept)
  double p_sifted_error = 0.0;  // sifted and the resolved bit differs from Alice's
  double p_double = 0.0;        // more than one detector clicked

  double qber() const { return p_sifted > 0.0 ? p_sifted_error / p_sifted : 0.0; }
};

// Detection unit model.
//
// Per slot: Bob's measurement basis is passive and uniform. In the matched
// basis the full pulse drives the correct detector, swapped to its partner
// with the misalignment probability; in the mismatched basis the pulse splits
// half/half across the pair. A detector seeing mean photon number x clicks
// with probability 1 - exp(-x * eta_i). All four detectors additionally dark
// click, each with probability dark_rate_i / pulse_rate_hz, and multi-click
// slots resolve to a uniformly random member of the clicked set.
class DetectionModel {
 public:
  DetectionModel(const ProtocolParams& params, const ChannelModel& channel);

  // Analytic branch: exact enumeration of the per-slot outcome tree.
  ClassStatistics class_statistics(IntensityClass cls) const;

  // Monte Carlo branch. All randomness is addressed by the pulse's slot index
  // in `channel_stream`, so any slot subset may be simulated in any order.
  DetectionRecord detect_pulse(const PulsePlan& plan,
                               const rng::Stream& channel_stream) const;

  double dark_click_prob(int detector) const { return dark_prob_[detector]; }
  double eta(int detector) const { return eta_[detector]; }

 private:
  std::array<double, kNumDetectors> eta_{};
  std::array<double, kNumDetectors> dark_prob_{};
  double misalignment_ = 0.0;
  double slot_period_s_ = 0.0;
  double mu_ = 0.0;
  double mu_prime_ = 0.0;
};

// Convenience wrapper constructing the model per call.
DetectionRecord detect_pulse(const PulsePlan& plan, const ChannelModel& channel,
                             const ProtocolParams& params,
                             const rng::Stream& channel_stream);

struct ClassCounts {
  std::int64_t sent = 0;
  std::int64_t clicks = 0;         // sampled slots with any click
  std::int64_t sifted = 0;         // sampled basis-matched subset (vacuum: = clicks)
  std::int64_t sifted_errors = 0;  // sampled errors within the sifted subset
  double expected_clicks = 0.0;
  double expected_sifted = 0.0;
  double expected_sifted_errors = 0.0;
};

struct AggregateCounts {
  std::array<ClassCounts, kNumClasses> per_class{};
};

// Samples a full run at once: class split, then per class the click, sifted
// and error counts via chained binomials with the exact analytic
// probabilities. Expected values are exposed alongside the samples.
AggregateCounts simulate_aggregate(const ProtocolParams& params,
                                   const ChannelModel& channel,
                                   std::int64_t n_pulses, rng::Engine& engine);

struct CalibrationResult {
  ChannelModel channel;
  // Uniform per-detector dark rates reproducing the observed vacuum rate.
  std::array<double, kNumDetectors> dark_rates_hz{};
  double eta_system = 0.0;          // transmittance * mean detector efficiency
  double fitted_extra_loss_db = 0.0;
  double model_s_mu = 0.0;          // decoy-class rate predicted by the fit
  double residual_s_mu_rel = 0.0;   // (model - observed) / observed
  double model_e_mu = 0.0;
  double residual_e_mu_abs = 0.0;
  int iterations = 0;
};

// Inverse-fits the channel against an observed tally: transmittance so the
// model's signal-class click rate matches S_mu', misalignment so the model
// QBER matches E_mu'. The decoy class is left as a residual diagnostic.
// Throws AnalysisError (NoSolution) when S_mu' <= S_0.
CalibrationResult calibrate_channel(const Tally& tally, const ProtocolParams& params);

// slot_index,basis,outcome,detector,timestamp_ns per line.
void write_detection_dump(std::ostream& out, std::span<const DetectionRecord> records);

}  // namespace qkd
