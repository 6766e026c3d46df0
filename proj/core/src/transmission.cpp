// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/transmission.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "qkdsim/errors.hpp"

namespace qkd {

ChannelModel channel_from_params(const ProtocolParams& params) {
  double loss_db =
      params.fiber_length_km * params.atten_db_per_km + params.extra_loss_db;
  ChannelModel channel;
  channel.transmittance = std::pow(10.0, -loss_db / 10.0);
  channel.misalignment_prob = params.misalignment_prob;
  return channel;
}

std::array<double, kNumDetectors> system_transmittance(const ProtocolParams& params) {
  ChannelModel channel = channel_from_params(params);
  std::array<double, kNumDetectors> eta{};
  for (int i = 0; i < kNumDetectors; ++i) {
    eta[i] = channel.transmittance * params.detector_efficiencies[i];
  }
  return eta;
}

DetectionModel::DetectionModel(const ProtocolParams& params,
                               const ChannelModel& channel) {
  for (int i = 0; i < kNumDetectors; ++i) {
    eta_[i] = channel.transmittance * params.detector_efficiencies[i];
    dark_prob_[i] = params.dark_rates_hz[i] / params.pulse_rate_hz;
  }
  misalignment_ = channel.misalignment_prob;
  slot_period_s_ = 1.0 / params.pulse_rate_hz;
  mu_ = params.mu;
  mu_prime_ = params.mu_prime;
}

namespace {

constexpr int pair_first(Basis b) { return b == Basis::Rectilinear ? 0 : 2; }

inline double click_prob(double mean_photons, double eta) {
  return -std::expm1(-mean_photons * eta);
}

// Accumulates one fully-determined routing case (photon click probabilities
// fixed per detector) into the class statistics, resolving multi-click slots
// uniformly.
void accumulate_case(ClassStatistics& stats, double weight,
                     const std::array<double, kNumDetectors>& photon,
                     const std::array<double, kNumDetectors>& dark,
                     bool vacuum, Basis alice_basis, int alice_bit) {
  // p + d - p d keeps full relative precision for the tiny click
  // probabilities this model runs at; the complement form would round them
  // at the 1e-16 absolute floor.
  std::array<double, kNumDetectors> q{};
  std::array<double, kNumDetectors> q_complement{};
  for (int i = 0; i < kNumDetectors; ++i) {
    q[i] = photon[i] + dark[i] - photon[i] * dark[i];
    q_complement[i] = (1.0 - photon[i]) * (1.0 - dark[i]);
  }
  for (unsigned mask = 1; mask < 16; ++mask) {
    double pr = weight;
    for (int i = 0; i < kNumDetectors; ++i) {
      pr *= (mask >> i) & 1u ? q[i] : q_complement[i];
    }
    if (pr == 0.0) continue;
    int size = std::popcount(mask);
    stats.p_click += pr;
    if (size > 1) stats.p_double += pr;
    double per_detector = pr / size;
    for (int r = 0; r < kNumDetectors; ++r) {
      if (!((mask >> r) & 1u)) continue;
      if (vacuum) {
        // Vacuum clicks are kept regardless of the resolved basis.
        stats.p_sifted += per_detector;
      } else if (detector_basis(r) == alice_basis) {
        stats.p_sifted += per_detector;
        if (detector_bit(r) != alice_bit) stats.p_sifted_error += per_detector;
      }
    }
  }
}

}  // namespace

ClassStatistics DetectionModel::class_statistics(IntensityClass cls) const {
  ClassStatistics stats;
  double intensity = cls == IntensityClass::Vacuum ? 0.0
                     : cls == IntensityClass::Decoy ? mu_
                                                    : mu_prime_;

  if (cls == IntensityClass::Vacuum) {
    std::array<double, kNumDetectors> no_photon{};
    accumulate_case(stats, 1.0, no_photon, dark_prob_, /*vacuum=*/true,
                    Basis::Rectilinear, 0);
    return stats;
  }

  for (int p = 0; p < 4; ++p) {
    auto alice = static_cast<Polarization>(p);
    Basis alice_basis = basis_of(alice);
    int alice_bit = bit_of(alice);
    for (int b = 0; b < 2; ++b) {
      auto bob_basis = static_cast<Basis>(b);
      double w = 0.25 * 0.5;
      if (bob_basis == alice_basis) {
        for (int swap = 0; swap < 2; ++swap) {
          double w_swap = w * (swap ? misalignment_ : 1.0 - misalignment_);
          if (w_swap == 0.0) continue;
          int target = detector_for(swap ? partner_of(alice) : alice);
          std::array<double, kNumDetectors> photon{};
          photon[target] = click_prob(intensity, eta_[target]);
          accumulate_case(stats, w_swap, photon, dark_prob_, false, alice_basis,
                          alice_bit);
        }
      } else {
        int first = pair_first(bob_basis);
        std::array<double, kNumDetectors> photon{};
        photon[first] = click_prob(0.5 * intensity, eta_[first]);
        photon[first + 1] = click_prob(0.5 * intensity, eta_[first + 1]);
        accumulate_case(stats, w, photon, dark_prob_, false, alice_basis,
                        alice_bit);
      }
    }
  }
  return stats;
}

DetectionRecord DetectionModel::detect_pulse(const PulsePlan& plan,
                                             const rng::Stream& channel_stream) const {
  auto slot = static_cast<std::uint64_t>(plan.slot_index);
  rng::Block draw = channel_stream.block(slot, 0);
  rng::Block dark_draw = channel_stream.block(slot, 1);

  Basis bob_basis = (draw[0] >> 63) ? Basis::Diagonal : Basis::Rectilinear;

  unsigned clicked = 0;
  if (plan.cls != IntensityClass::Vacuum) {
    Polarization alice = *plan.polarization;
    if (bob_basis == basis_of(alice)) {
      bool swap = rng::to_unit(draw[1]) < misalignment_;
      int target = detector_for(swap ? partner_of(alice) : alice);
      if (rng::to_unit(draw[2]) < click_prob(plan.intensity, eta_[target])) {
        clicked |= 1u << target;
      }
    } else {
      int first = pair_first(bob_basis);
      if (rng::to_unit(draw[2]) < click_prob(0.5 * plan.intensity, eta_[first])) {
        clicked |= 1u << first;
      }
      if (rng::to_unit(draw[3]) < click_prob(0.5 * plan.intensity, eta_[first + 1])) {
        clicked |= 1u << (first + 1);
      }
    }
  }
  for (int i = 0; i < kNumDetectors; ++i) {
    if (rng::to_unit(dark_draw[i]) < dark_prob_[i]) clicked |= 1u << i;
  }

  DetectionRecord record;
  record.slot_index = plan.slot_index;
  record.timestamp_s = static_cast<double>(plan.slot_index) * slot_period_s_;
  record.basis_chosen = bob_basis;

  int size = std::popcount(clicked);
  if (size == 0) {
    return record;
  }
  int resolved = std::countr_zero(clicked);
  if (size > 1) {
    // Uniform pick among the clicked set.
    rng::Block resolve_draw = channel_stream.block(slot, 2);
    int pick = static_cast<int>(rng::to_unit(resolve_draw[0]) * size);
    if (pick >= size) pick = size - 1;
    unsigned remaining = clicked;
    for (int skip = 0; skip < pick; ++skip) {
      remaining &= remaining - 1;
    }
    resolved = std::countr_zero(remaining);
  }
  record.outcome = size > 1 ? OutcomeKind::DoubleClick : OutcomeKind::Click;
  record.detector = resolved;
  record.basis_chosen = detector_basis(resolved);
  return record;
}

DetectionRecord detect_pulse(const PulsePlan& plan, const ChannelModel& channel,
                             const ProtocolParams& params,
                             const rng::Stream& channel_stream) {
  return DetectionModel(params, channel).detect_pulse(plan, channel_stream);
}

AggregateCounts simulate_aggregate(const ProtocolParams& params,
                                   const ChannelModel& channel,
                                   std::int64_t n_pulses, rng::Engine& engine) {
  if (n_pulses < 0) {
    throw ValidationError("simulate_aggregate: pulse count must be >= 0");
  }
  constexpr std::int64_t kMaxCount = std::int64_t{1} << 62;
  if (n_pulses > kMaxCount) {
    throw AnalysisError("simulate_aggregate: expected counts exceed representable range");
  }

  DetectionModel model(params, channel);
  std::vector<double> probs(params.class_probs.begin(), params.class_probs.end());
  std::vector<std::int64_t> sent = rng::multinomial(engine, n_pulses, probs);

  AggregateCounts out;
  for (int k = 0; k < kNumClasses; ++k) {
    auto cls = static_cast<IntensityClass>(k);
    ClassStatistics stats = model.class_statistics(cls);
    ClassCounts& cc = out.per_class[k];
    cc.sent = sent[k];

    double expected_sent =
        static_cast<double>(n_pulses) * params.class_probs[k];
    cc.expected_clicks = expected_sent * stats.p_click;
    cc.expected_sifted = expected_sent * stats.p_sifted;
    cc.expected_sifted_errors = expected_sent * stats.p_sifted_error;

    cc.clicks = rng::binomial(engine, cc.sent, stats.p_click);
    double sift_given_click =
        stats.p_click > 0.0 ? stats.p_sifted / stats.p_click : 0.0;
    cc.sifted = rng::binomial(engine, cc.clicks, std::min(1.0, sift_given_click));
    cc.sifted_errors = rng::binomial(engine, cc.sifted, std::min(1.0, stats.qber()));
  }
  return out;
}

namespace {

double signal_click_rate(const ProtocolParams& params, const ChannelModel& channel) {
  return DetectionModel(params, channel)
      .class_statistics(IntensityClass::Signal)
      .p_click;
}

double signal_qber(const ProtocolParams& params, const ChannelModel& channel) {
  return DetectionModel(params, channel).class_statistics(IntensityClass::Signal).qber();
}

}  // namespace

CalibrationResult calibrate_channel(const Tally& tally, const ProtocolParams& params) {
  for (int k = 0; k < kNumClasses; ++k) {
    if (tally.n_sent[k] <= 0) {
      throw AnalysisError("calibrate_channel: tally must have sent counts for all classes");
    }
  }
  // A dark-free run (C0 = 0) is fit with a zero dark floor.
  for (auto cls : {IntensityClass::Decoy, IntensityClass::Signal}) {
    if (tally.c_received[static_cast<int>(cls)] <= 0) {
      throw AnalysisError(
          "calibrate_channel: tally must have clicks for the decoy and signal classes");
    }
  }
  double s0 = tally.counting_rate(IntensityClass::Vacuum);
  double s_mu = tally.counting_rate(IntensityClass::Decoy);
  double s_mu_prime = tally.counting_rate(IntensityClass::Signal);
  double e_mu_prime = tally.e_observed[static_cast<int>(IntensityClass::Signal)];

  if (s_mu_prime <= s0) {
    throw AnalysisError(
        "calibrate_channel: NoSolution, signal rate does not exceed the dark floor");
  }

  // Uniform per-detector dark probability reproducing the observed vacuum
  // rate exactly: 1 - (1 - d)^4 = S0.
  double dark_prob = 1.0 - std::pow(1.0 - s0, 0.25);
  ProtocolParams fitted = params;
  for (int i = 0; i < kNumDetectors; ++i) {
    fitted.dark_rates_hz[i] = dark_prob * params.pulse_rate_hz;
  }

  auto bisect = [](auto f, double lo, double hi, int steps) {
    // f must be nondecreasing with f(lo) <= 0 <= f(hi).
    for (int i = 0; i < steps; ++i) {
      double mid = 0.5 * (lo + hi);
      if (f(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  ChannelModel channel{1.0, 0.0};
  int iterations = 0;
  // The QBER fit feeds back into the click rate only through the efficiency
  // difference between swapped detectors; a few alternations converge.
  for (int pass = 0; pass < 4; ++pass) {
    ++iterations;
    double mis = channel.misalignment_prob;
    channel.transmittance = bisect(
        [&](double t) {
          return signal_click_rate(fitted, ChannelModel{t, mis}) - s_mu_prime;
        },
        0.0, 1.0, 64);
    double t = channel.transmittance;
    if (signal_qber(fitted, ChannelModel{t, 0.5}) < e_mu_prime) {
      channel.misalignment_prob = 0.5;  // target above the saturating QBER
    } else {
      channel.misalignment_prob = bisect(
          [&](double m) {
            return signal_qber(fitted, ChannelModel{t, m}) - e_mu_prime;
          },
          0.0, 0.5, 64);
    }
  }

  DetectionModel model(fitted, channel);
  ClassStatistics decoy = model.class_statistics(IntensityClass::Decoy);

  CalibrationResult result;
  result.channel = channel;
  result.dark_rates_hz = fitted.dark_rates_hz;
  double mean_eff = 0.0;
  for (double eff : params.detector_efficiencies) mean_eff += eff;
  mean_eff /= kNumDetectors;
  result.eta_system = channel.transmittance * mean_eff;
  result.fitted_extra_loss_db =
      -10.0 * std::log10(channel.transmittance) -
      params.fiber_length_km * params.atten_db_per_km;
  result.model_s_mu = decoy.p_click;
  result.residual_s_mu_rel = (decoy.p_click - s_mu) / s_mu;
  result.model_e_mu = decoy.qber();
  result.residual_e_mu_abs =
      decoy.qber() - tally.e_observed[static_cast<int>(IntensityClass::Decoy)];
  result.iterations = iterations;
  return result;
}

void write_detection_dump(std::ostream& out, std::span<const DetectionRecord> records) {
  for (const DetectionRecord& r : records) {
    const char* outcome = r.outcome == OutcomeKind::NoClick    ? "none"
                          : r.outcome == OutcomeKind::Click    ? "click"
                                                               : "double";
    out << r.slot_index << ',' << to_string(r.basis_chosen) << ',' << outcome
        << ',' << r.detector << ','
        << static_cast<std::int64_t>(std::llround(r.timestamp_s * 1e9)) << '\n';
  }
}

}  // namespace qkd
