// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/simulation.hpp"

#include <string>
#include <vector>

#include "qkdsim/errors.hpp"
#include "qkdsim/synchronizer.hpp"

namespace qkd {

namespace {

io::TallyFile tally_file_for(const ProtocolParams& params, const Tally& tally) {
  io::TallyFile out;
  out.tally = tally;
  out.analysis = analysis_config(params);
  out.pulse_rate_hz = params.pulse_rate_hz;
  return out;
}

SimOutputs run_aggregate(const io::SimConfig& config, const SimOptions& options) {
  const ProtocolParams& params = config.params;
  rng::Engine engine(rng::Stream(options.seed, rng::StreamPurpose::Aggregate));
  ChannelModel channel = channel_from_params(params);

  SimOutputs out;
  out.counts = simulate_aggregate(params, channel, params.total_pulses, engine);

  Tally tally;
  for (int k = 0; k < kNumClasses; ++k) {
    tally.n_sent[k] = out.counts.per_class[k].sent;
    tally.c_received[k] = out.counts.per_class[k].clicks;
    out.detections_total += out.counts.per_class[k].clicks;
  }

  // QBER estimates from the sampled sifted/error counts, thinned to the test
  // subset where configured.
  for (int k = 1; k < kNumClasses; ++k) {
    const ClassCounts& cc = out.counts.per_class[k];
    QberSource source = k == static_cast<int>(IntensityClass::Decoy)
                            ? options.decoy_qber_source
                            : options.signal_qber_source;
    std::int64_t inspected = cc.sifted;
    std::int64_t errors = cc.sifted_errors;
    if (source == QberSource::PhaseTestOnly) {
      errors = rng::binomial(engine, cc.sifted_errors, params.test_fraction_phase);
      std::int64_t ok = rng::binomial(engine, cc.sifted - cc.sifted_errors,
                                      params.test_fraction_phase);
      inspected = errors + ok;
    }
    if (inspected == 0) {
      if (cc.sifted > 0) {
        throw AnalysisError(
            std::string("simulate: EmptyTestSet, no test bits for class ") +
            to_string(static_cast<IntensityClass>(k)));
      }
      tally.e_observed[k] = 0.0;
    } else {
      tally.e_observed[k] =
          static_cast<double>(errors) / static_cast<double>(inspected);
    }
    tally.test_counts[k] = inspected;
  }

  validate_tally_or_throw(tally);
  out.tally_file = tally_file_for(params, tally);
  return out;
}

SimOutputs run_per_pulse(const io::SimConfig& config, const SimOptions& options) {
  const ProtocolParams& params = config.params;
  if (params.total_pulses > options.per_pulse_cap) {
    throw ValidationError(
        "per-pulse mode: total_pulses " + std::to_string(params.total_pulses) +
        " exceeds the cap " + std::to_string(options.per_pulse_cap) +
        "; use aggregate mode for runs of this size");
  }

  SourceStream source(params, options.seed, params.slots_per_block());
  DetectionModel model(params, channel_from_params(params));
  rng::Stream channel_stream(options.seed, rng::StreamPurpose::Channel);
  rng::Stream clock_stream(options.seed, rng::StreamPurpose::Clock);
  rng::Stream test_stream(options.seed, rng::StreamPurpose::TestBits);

  std::array<std::int64_t, kNumClasses> sent{};
  std::vector<std::int64_t> clicked_slots;
  std::vector<DetectionRecord> records;

  const std::int64_t n = params.total_pulses;
  for (std::int64_t slot = 0; slot < n; ++slot) {
    PulsePlan plan = source.plan_at(slot);
    ++sent[static_cast<int>(plan.cls)];
    if (options.plan_dump != nullptr) {
      write_plan_dump(*options.plan_dump, std::span<const PulsePlan>(&plan, 1));
    }
    DetectionRecord record = model.detect_pulse(plan, channel_stream);
    if (record.outcome == OutcomeKind::NoClick) continue;
    clicked_slots.push_back(slot);
    records.push_back(record);
  }

  // Timestamp the detections with Bob's clock and recover slots block-wise.
  TimestampSet stamps =
      emit_timestamps(clicked_slots, config.clock, params, clock_stream);
  std::vector<RecoveredSlot> recovered =
      recover_indices(stamps.detection_timestamps_s, stamps.frames, params);

  SimOutputs out;
  std::vector<DetectionRecord> usable;
  usable.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].timestamp_s = stamps.detection_timestamps_s[i];
    switch (recovered[i].status) {
      case RecoveryStatus::Recovered:
        records[i].slot_index = recovered[i].slot_index;
        usable.push_back(records[i]);
        break;
      case RecoveryStatus::Ambiguous:
        ++out.ambiguous_dropped;
        break;
      case RecoveryStatus::OutOfRange:
        ++out.out_of_range_dropped;
        break;
    }
  }
  out.detections_total = static_cast<std::int64_t>(records.size());
  if (options.detection_dump != nullptr) {
    write_detection_dump(*options.detection_dump, usable);
  }

  SiftResult sifted = sift(
      [&source, n](std::int64_t slot) -> std::optional<PulsePlan> {
        if (slot < 0 || slot >= n) return std::nullopt;
        return source.plan_at(slot);
      },
      usable);
  sample_test_bits(sifted.bits, params.test_fraction_phase, params.test_fraction_bit,
                   test_stream);
  Tally tally = build_tally(sifted, sent, options.decoy_qber_source,
                            options.signal_qber_source);

  for (int k = 0; k < kNumClasses; ++k) {
    ClassCounts& cc = out.counts.per_class[k];
    cc.sent = sent[k];
    cc.clicks = sifted.clicks[k];
    cc.sifted = sifted.kept[k];
    ClassStatistics stats = model.class_statistics(static_cast<IntensityClass>(k));
    double expected_sent = static_cast<double>(n) * params.class_probs[k];
    cc.expected_clicks = expected_sent * stats.p_click;
    cc.expected_sifted = expected_sent * stats.p_sifted;
    cc.expected_sifted_errors = expected_sent * stats.p_sifted_error;
  }
  for (const SiftedBit& bit : sifted.bits) {
    if (bit.alice_bit.has_value() && *bit.alice_bit != bit.bob_bit) {
      ++out.counts.per_class[static_cast<int>(bit.cls)].sifted_errors;
    }
  }

  out.tally_file = tally_file_for(params, tally);
  return out;
}

}  // namespace

SimOutputs run_simulation(const io::SimConfig& config, const SimOptions& options) {
  validate_params_or_throw(config.params);
  return options.mode == SimMode::Aggregate ? run_aggregate(config, options)
                                            : run_per_pulse(config, options);
}

}  // namespace qkd
