// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/sifting.hpp"

#include <cmath>

#include <doctest.h>

#include "qkdsim/errors.hpp"
#include "qkdsim/refdata.hpp"
#include "test_util.hpp"

using namespace qkd;

namespace {

const ProtocolParams kParams;

DetectionRecord click(std::int64_t slot, int detector) {
  return {slot, detector_basis(detector), OutcomeKind::Click, detector, 0.0};
}

}  // namespace

TEST_CASE("matched basis detections are kept with both bits") {
  std::vector<PulsePlan> plans{
      make_pulse_plan(kParams, 0, IntensityClass::Decoy, Polarization::D)};
  SiftResult r = sift(plans, {click(0, detector_for(Polarization::D))});
  REQUIRE(r.bits.size() == 1);
  CHECK(r.bits[0].cls == IntensityClass::Decoy);
  CHECK(*r.bits[0].alice_bit == r.bits[0].bob_bit);
  CHECK(r.clicks[1] == 1);
  CHECK(r.kept[1] == 1);
}

TEST_CASE("mismatched basis detections are discarded but still counted") {
  std::vector<PulsePlan> plans{
      make_pulse_plan(kParams, 0, IntensityClass::Signal, Polarization::H)};
  SiftResult r = sift(plans, {click(0, detector_for(Polarization::D))});
  CHECK(r.bits.empty());
  CHECK(r.discarded_mismatch == 1);
  // The click still enters C_k: counting rates are per emitted pulse.
  CHECK(r.clicks[2] == 1);
  CHECK(r.kept[2] == 0);
}

TEST_CASE("vacuum clicks are kept unconditionally without a sender bit") {
  std::vector<PulsePlan> plans{
      make_pulse_plan(kParams, 0, IntensityClass::Vacuum, std::nullopt),
      make_pulse_plan(kParams, 1, IntensityClass::Vacuum, std::nullopt)};
  SiftResult r = sift(plans, {click(0, 0), click(1, 3)});
  REQUIRE(r.bits.size() == 2);
  CHECK_FALSE(r.bits[0].alice_bit.has_value());
  CHECK_FALSE(r.bits[1].alice_bit.has_value());
  CHECK(r.clicks[0] == 2);
}

TEST_CASE("unknown slots raise") {
  std::vector<PulsePlan> plans{
      make_pulse_plan(kParams, 0, IntensityClass::Decoy, Polarization::H)};
  CHECK_THROWS_AS(sift(plans, {click(5, 0)}), ValidationError);
}

TEST_CASE("kept fraction approaches one half for nonvacuum classes") {
  ProtocolParams p = kParams;
  p.fiber_length_km = 0.0;
  p.extra_loss_db = 3.0;
  p.dark_rates_hz = {0, 0, 0, 0};
  DetectionModel model(p, channel_from_params(p));
  SourceStream source(p, 77, 1 << 18);
  rng::Stream channel_stream(77, rng::StreamPurpose::Channel);

  auto plans = source.generate_block(0);
  std::vector<DetectionRecord> detections;
  for (const PulsePlan& plan : plans) {
    DetectionRecord rec = model.detect_pulse(plan, channel_stream);
    if (rec.outcome != OutcomeKind::NoClick) detections.push_back(rec);
  }
  SiftResult r = sift(plans, detections);
  for (int k = 1; k < kNumClasses; ++k) {
    CHECK(test::within_binomial_sigma(r.kept[k], static_cast<double>(r.clicks[k]),
                                      0.5, 5.0));
  }
}

TEST_CASE("test-bit sampling hits the configured fractions") {
  std::vector<SiftedBit> bits;
  for (std::int64_t slot = 0; slot < 100000; ++slot) {
    bits.push_back({slot, IntensityClass::Signal, 0, 0, BitRole::KeyCandidate});
  }
  sample_test_bits(bits, 0.1, 0.05, rng::Stream(3, rng::StreamPurpose::TestBits));
  auto roles = count_roles(bits);
  auto signal = roles[static_cast<int>(IntensityClass::Signal)];
  std::int64_t total = signal[0] + signal[1] + signal[2];
  REQUIRE(total == 100000);
  CHECK(test::within_binomial_sigma(signal[static_cast<int>(BitRole::PhaseTest)],
                                    1e5, 0.1, 5.0));
  CHECK(test::within_binomial_sigma(signal[static_cast<int>(BitRole::BitTest)],
                                    1e5, 0.05, 5.0));

  // Zero fractions put everything in the key set.
  sample_test_bits(bits, 0.0, 0.0, rng::Stream(3, rng::StreamPurpose::TestBits));
  roles = count_roles(bits);
  CHECK(roles[static_cast<int>(IntensityClass::Signal)][0] == 100000);

  std::vector<SiftedBit> empty;
  CHECK_NOTHROW(sample_test_bits(empty, 0.1, 0.05,
                                 rng::Stream(3, rng::StreamPurpose::TestBits)));
}

TEST_CASE("tally reconstruction matches the reference rates") {
  // Counts scaled 1e-6 to keep the test light; the rates are unchanged.
  SiftResult sifted;
  sifted.clicks = {3263, 77157, 449467};
  std::array<std::int64_t, 3> sent{247'120'000'000, 247'120'000'000, 494'240'000'000};
  for (std::int64_t i = 0; i < sifted.clicks[1] / 2; ++i) {
    sifted.bits.push_back({i, IntensityClass::Decoy, 0, i % 25 == 0 ? 1 : 0,
                           BitRole::KeyCandidate});
  }
  for (std::int64_t i = 0; i < 1000; ++i) {
    sifted.bits.push_back({i, IntensityClass::Signal, 0, i % 50 == 0 ? 1 : 0,
                           BitRole::PhaseTest});
  }
  sifted.kept = {0, sifted.clicks[1] / 2, 1000};
  Tally t = build_tally(sifted, sent);
  CHECK(t.counting_rate(IntensityClass::Vacuum) ==
        doctest::Approx(1.32041e-8).epsilon(1e-4));
  CHECK(t.counting_rate(IntensityClass::Decoy) ==
        doctest::Approx(3.12225e-7).epsilon(1e-4));
  CHECK(t.counting_rate(IntensityClass::Signal) ==
        doctest::Approx(9.0941e-7).epsilon(1e-4));
  CHECK(t.e_observed[1] == doctest::Approx(0.04).epsilon(1e-2));
  CHECK(t.e_observed[2] == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(t.test_counts[1] == sifted.clicks[1] / 2);  // all decoy bits inspected
  CHECK(t.test_counts[2] == 1000);
}

TEST_CASE("agreeing bits give zero QBER and flipped bits are rejected") {
  SiftResult sifted;
  sifted.clicks = {0, 10, 10};
  sifted.kept = {0, 5, 5};
  std::array<std::int64_t, 3> sent{100, 100, 100};
  for (std::int64_t i = 0; i < 5; ++i) {
    sifted.bits.push_back({i, IntensityClass::Decoy, 1, 1, BitRole::KeyCandidate});
    sifted.bits.push_back({i, IntensityClass::Signal, 0, 0, BitRole::PhaseTest});
  }
  Tally t = build_tally(sifted, sent);
  CHECK(t.e_observed[1] == 0.0);
  CHECK(t.e_observed[2] == 0.0);

  for (SiftedBit& bit : sifted.bits) bit.bob_bit = 1 - bit.bob_bit;
  // Every bit flipped: QBER 1 violates the tally invariant.
  CHECK_THROWS_AS(build_tally(sifted, sent), ValidationError);
}

TEST_CASE("empty test set raises when a class has kept bits") {
  SiftResult sifted;
  sifted.clicks = {0, 0, 4};
  sifted.kept = {0, 0, 2};
  sifted.bits.push_back({0, IntensityClass::Signal, 0, 0, BitRole::KeyCandidate});
  sifted.bits.push_back({1, IntensityClass::Signal, 1, 1, BitRole::KeyCandidate});
  std::array<std::int64_t, 3> sent{10, 10, 10};
  // Signal QBER comes from the phase-test subset, which is empty here.
  CHECK_THROWS_AS(build_tally(sifted, sent), AnalysisError);
  // With the all-bits estimator the same input is fine.
  Tally t = build_tally(sifted, sent, QberSource::AllBits, QberSource::AllBits);
  CHECK(t.e_observed[2] == 0.0);
}

TEST_CASE("role partition sizes sum to the kept counts") {
  ProtocolParams p = kParams;
  p.fiber_length_km = 0.0;
  p.extra_loss_db = 10.0;
  DetectionModel model(p, channel_from_params(p));
  SourceStream source(p, 11, 1 << 16);
  rng::Stream channel_stream(11, rng::StreamPurpose::Channel);
  auto plans = source.generate_block(0);
  std::vector<DetectionRecord> detections;
  for (const PulsePlan& plan : plans) {
    DetectionRecord rec = model.detect_pulse(plan, channel_stream);
    if (rec.outcome != OutcomeKind::NoClick) detections.push_back(rec);
  }
  SiftResult r = sift(plans, detections);
  sample_test_bits(r.bits, 0.1, 0.05, rng::Stream(11, rng::StreamPurpose::TestBits));
  auto roles = count_roles(r.bits);
  for (int k = 0; k < kNumClasses; ++k) {
    CHECK(roles[k][0] + roles[k][1] + roles[k][2] == r.kept[k]);
  }
}
