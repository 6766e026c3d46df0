// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/simulation.hpp"

#include <cmath>
#include <sstream>

#include <doctest.h>

#include "qkdsim/errors.hpp"
#include "qkdsim/refdata.hpp"
#include "test_util.hpp"

using namespace qkd;

TEST_CASE("aggregate runs are deterministic per seed") {
  io::SimConfig config{refdata::reference_params(), ClockModel{}};
  SimOptions options;
  options.seed = 7;
  SimOutputs a = run_simulation(config, options);
  SimOutputs b = run_simulation(config, options);
  CHECK(a.tally_file.tally.c_received == b.tally_file.tally.c_received);
  CHECK(a.tally_file.tally.n_sent == b.tally_file.tally.n_sent);
  CHECK(a.tally_file.tally.e_observed == b.tally_file.tally.e_observed);

  options.seed = 8;
  SimOutputs c = run_simulation(config, options);
  CHECK(a.tally_file.tally.c_received != c.tally_file.tally.c_received);
}

TEST_CASE("aggregate counts at full scale stay near the reference") {
  io::SimConfig config{refdata::reference_params(), ClockModel{}};
  SimOptions options;
  options.seed = 1;
  SimOutputs out = run_simulation(config, options);
  const Tally& t = out.tally_file.tally;
  // Expected counts match the dataset by calibration; this seed's samples
  // land within 1 percent.
  CHECK(std::abs(static_cast<double>(t.c_received[0]) - 3263.0) < 0.01 * 3263.0);
  CHECK(std::abs(static_cast<double>(t.c_received[1]) - 77157.0) < 0.01 * 77157.0);
  CHECK(std::abs(static_cast<double>(t.c_received[2]) - 449467.0) < 0.01 * 449467.0);
  // The analysis chain accepts the simulated tally end to end.
  AnalysisResult r = analyze(t, out.tally_file.analysis);
  CHECK(r.report.rate_total_hz > 10.0);
  CHECK(r.report.rate_total_hz < 18.0);
}

TEST_CASE("per-pulse cap guards desk-scale runs") {
  io::SimConfig config{refdata::reference_params(), ClockModel{}};
  SimOptions options;
  options.mode = SimMode::PerPulse;
  CHECK_THROWS_AS(run_simulation(config, options), ValidationError);
}

TEST_CASE("lossless noiseless per-pulse run has zero QBER") {
  io::SimConfig config;
  config.params.total_pulses = 1'000'000;
  config.params.fiber_length_km = 0.0;
  config.params.extra_loss_db = 0.0;
  config.params.detector_efficiencies = {1.0, 1.0, 1.0, 1.0};
  config.params.dark_rates_hz = {0, 0, 0, 0};
  config.params.misalignment_prob = 0.0;
  SimOptions options;
  options.mode = SimMode::PerPulse;
  options.decoy_qber_source = QberSource::AllBits;
  options.signal_qber_source = QberSource::AllBits;
  SimOutputs out = run_simulation(config, options);
  const Tally& t = out.tally_file.tally;
  CHECK(t.e_observed[1] == 0.0);
  CHECK(t.e_observed[2] == 0.0);
  CHECK(t.c_received[0] == 0);  // no darks, no vacuum clicks
  // Click probability through the lossless channel is 1 - e^-intensity.
  CHECK(test::within_binomial_sigma(t.c_received[1],
                                    static_cast<double>(t.n_sent[1]),
                                    -std::expm1(-config.params.mu), 5.0));
  CHECK(test::within_binomial_sigma(t.c_received[2],
                                    static_cast<double>(t.n_sent[2]),
                                    -std::expm1(-config.params.mu_prime), 5.0));
  CHECK(out.ambiguous_dropped == 0);
  CHECK(out.out_of_range_dropped == 0);
}

TEST_CASE("per-pulse pipeline matches the analytic expectation at scale") {
  io::SimConfig config{refdata::reference_params(), ClockModel{}};
  config.params.total_pulses = 20'000'000;
  SimOptions options;
  options.mode = SimMode::PerPulse;
  options.seed = 5;
  options.signal_qber_source = QberSource::AllBits;  // a handful of bits at this N
  SimOutputs out = run_simulation(config, options);
  for (int k = 0; k < kNumClasses; ++k) {
    const ClassCounts& cc = out.counts.per_class[k];
    double sigma = std::sqrt(cc.expected_clicks) + 1.0;
    CHECK(std::abs(static_cast<double>(cc.clicks) - cc.expected_clicks) <=
          5.0 * sigma);
  }
}

TEST_CASE("per-pulse detections survive a drifting clock below threshold") {
  io::SimConfig config{refdata::reference_params(), ClockModel{40.0, 0.0, 0.1}};
  config.params.total_pulses = 20'000'000;
  config.params.fiber_length_km = 0.0;  // short strong channel, many detections
  config.params.extra_loss_db = 10.0;
  SimOptions options;
  options.mode = SimMode::PerPulse;
  options.seed = 6;
  options.signal_qber_source = QberSource::AllBits;
  SimOutputs out = run_simulation(config, options);
  CHECK(out.detections_total > 100);
  CHECK(out.out_of_range_dropped == 0);
  // Well under the 62.5 ppm threshold with a 0.05 guard: nothing flagged.
  CHECK(out.ambiguous_dropped == 0);
  CHECK(out.tally_file.tally.e_observed[2] < 0.1);
}

TEST_CASE("dumps are written when requested") {
  io::SimConfig config;
  config.params.total_pulses = 200'000;
  config.params.fiber_length_km = 0.0;
  config.params.extra_loss_db = 20.0;
  SimOptions options;
  options.mode = SimMode::PerPulse;
  std::ostringstream detections, plans;
  options.detection_dump = &detections;
  options.plan_dump = &plans;
  SimOutputs out = run_simulation(config, options);
  CHECK(plans.str().find(",") != std::string::npos);
  if (out.detections_total > 0) {
    CHECK(!detections.str().empty());
  }
}
