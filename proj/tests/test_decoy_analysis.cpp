// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/decoy_analysis.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qkdsim/errors.hpp"
#include "qkdsim/poisson.hpp"
#include "qkdsim/refdata.hpp"
#include "qkdsim/rng.hpp"

using namespace qkd;

namespace {

const io::TallyFile kRef = refdata::reference_tally();

// Independent residual of the joint constraints, written directly from the
// defining equations; used as the grid-scan oracle.
struct OracleProblem {
  double s_mu, s_mup, n_mu, mu, mup, n_sigma, s0_eq, s0_pr;

  double margin(double s1) const {
    double emu = std::exp(-mu), emup = std::exp(-mup);
    double c = 1.0 - emu - mu * emu;
    double csc = s_mu - emu * s0_eq - mu * emu * s1;
    double sc = csc / c;
    double lhs = 0.0;
    if (sc > 0.0) {
      double factor = 1.0 - n_sigma / std::sqrt(sc * n_mu);
      lhs = c * (factor > 0.0 ? factor * sc : 0.0);
    }
    double s1r = 0.0;
    if (s1 > 0.0) {
      double factor = 1.0 - n_sigma * std::exp(mu / 2.0) / std::sqrt(mu * s1 * n_mu);
      s1r = factor > 0.0 ? factor * s1 : 0.0;
    }
    double ratio = (mu * mu * emu) / (mup * mup * emup);
    return ratio * (s_mup - mup * emup * s1r - emup * s0_pr) - lhs;
  }

  // First feasible point of an n_points grid over [0, s1_max]; returns a
  // negative value when the whole grid is infeasible.
  double grid_scan(int n_points) const {
    double emu = std::exp(-mu);
    double s1_max = (s_mu - emu * s0_eq) / (mu * emu);
    for (int i = 0; i <= n_points; ++i) {
      double s1 = s1_max * i / n_points;
      if (margin(s1) >= 0.0) return s1;
    }
    return -1.0;
  }

  double step(int n_points) const {
    double emu = std::exp(-mu);
    return (s_mu - emu * s0_eq) / (mu * emu) / n_points;
  }
};

OracleProblem oracle_for(const Tally& tally, const AnalysisConfig& cfg,
                         double s0_eq, double s0_pr) {
  return OracleProblem{tally.counting_rate(IntensityClass::Decoy),
                       tally.counting_rate(IntensityClass::Signal),
                       static_cast<double>(tally.n_sent[1]),
                       cfg.mu,
                       cfg.mu_prime,
                       cfg.n_sigma,
                       s0_eq,
                       s0_pr};
}

// Tally generated by exact Poisson mixing of a per-photon-number yield curve
// y_n (truncated at n = 40) and error curve e_n.
// n_class is large so count rounding stays far below the assertion
// tolerances.
Tally poissonian_tally(double mu, double mup, const std::vector<double>& yields,
                       const std::vector<double>& errors,
                       std::int64_t n_class = 1'000'000'000'000'000) {
  Tally t;
  t.n_sent = {n_class, n_class, 2 * n_class};
  std::array<double, 2> intensities{mu, mup};
  for (int k = 1; k < 3; ++k) {
    double nu = intensities[k - 1];
    double rate = 0.0, err = 0.0;
    for (std::size_t n = 0; n < yields.size(); ++n) {
      double w = poisson_pmf(nu, static_cast<int>(n)) * yields[n];
      rate += w;
      err += w * errors[n];
    }
    t.c_received[k] = static_cast<std::int64_t>(std::llround(
        rate * static_cast<double>(t.n_sent[k])));
    t.e_observed[k] = rate > 0.0 ? err / rate : 0.0;
    t.test_counts[k] = t.c_received[k] / 10;
  }
  t.c_received[0] = static_cast<std::int64_t>(std::llround(
      yields[0] * static_cast<double>(t.n_sent[0])));
  return t;
}

}  // namespace

TEST_CASE("binary entropy reference points and domain") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.0196) == doctest::Approx(0.13918873120774167).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
  CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("binary entropy symmetry and maximum") {
  for (int i = 0; i <= 1000; ++i) {
    double x = static_cast<double>(i) / 1000.0;
    CHECK(std::abs(binary_entropy(x) - binary_entropy(1.0 - x)) < 1e-12);
    CHECK(binary_entropy(x) <= 1.0 + 1e-12);
  }
}

TEST_CASE("qber upper bound reference points") {
  CHECK(qber_upper_bound(0.0196, 449467, 0.1, 10.0) ==
        doctest::Approx(0.02620357523378692).epsilon(1e-12));
  CHECK(qber_upper_bound(0.0404, 77157, 0.1, 10.0) ==
        doctest::Approx(0.06328247602330354).epsilon(1e-12));
  // Published counterparts within their regression windows.
  CHECK(std::abs(qber_upper_bound(0.0196, 449467, 0.1, 10.0) - 0.0263) < 2e-4);
  CHECK(std::abs(qber_upper_bound(0.0404, 77157, 0.1, 10.0) - 0.0633) < 2e-4);
  // Zero QBER carries no fluctuation.
  CHECK(qber_upper_bound(0.0, 1000, 0.1, 10.0) == 0.0);
  CHECK_THROWS_AS(qber_upper_bound(0.02, 0, 0.1, 10.0), AnalysisError);
  CHECK_THROWS_AS(qber_upper_bound(-0.1, 100, 0.1, 10.0), std::domain_error);
}

TEST_CASE("qber upper bound grows with n_sigma") {
  double prev = 0.0;
  for (double n_sigma : {0.0, 1.0, 5.0, 10.0, 20.0}) {
    double e = qber_upper_bound(0.0196, 449467, 0.1, n_sigma);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("vacuum bounds reference points") {
  double s0 = kRef.tally.counting_rate(IntensityClass::Vacuum);
  double n0 = static_cast<double>(kRef.tally.n_sent[0]);
  VacuumBounds b = vacuum_bounds(s0, n0, 10.0);
  CHECK(b.r0 == doctest::Approx(0.1750618296273089).epsilon(1e-12));
  CHECK(b.s0_low == doctest::Approx(1.0892575469108494e-8).epsilon(1e-12));
  CHECK(b.s0_high == doctest::Approx(1.5515647256692737e-8).epsilon(1e-12));
  CHECK_FALSE(b.clamped);

  VacuumBounds none = vacuum_bounds(s0, n0, 0.0);
  CHECK(none.s0_low == s0);
  CHECK(none.s0_high == s0);

  // 25 vacuum counts: r0 = 2 and the lower bound clamps to zero.
  VacuumBounds clamped = vacuum_bounds(25.0 / 1e6, 1e6, 10.0);
  CHECK(clamped.r0 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(clamped.s0_low == 0.0);
  CHECK(clamped.clamped);

  CHECK_THROWS_AS(vacuum_bounds(0.0, 1e6, 10.0), AnalysisError);
}

TEST_CASE("decoy branch solves to the published s1 and is tight") {
  VacuumBounds vb = vacuum_bounds(kRef.tally.counting_rate(IntensityClass::Vacuum),
                                  static_cast<double>(kRef.tally.n_sent[0]), 10.0);
  SinglePhotonSolution sol =
      solve_single_photon(kRef.tally, kRef.analysis, vb.s0_low, vb.s0_low);
  CHECK(sol.s1 == doctest::Approx(1.3707e-6).epsilon(0.002));
  CHECK(sol.s1 == doctest::Approx(1.370695961688154e-6).epsilon(1e-9));
  CHECK(sol.residual_rel < 1e-10);
  CHECK(sol.s_c > 0.0);

  // Below the root the constraint must be violated.
  OracleProblem oracle = oracle_for(kRef.tally, kRef.analysis, vb.s0_low, vb.s0_low);
  CHECK(oracle.margin(sol.s1 * 0.999) < 0.0);
  CHECK(oracle.margin(sol.s1 * 1.001) > 0.0);
}

TEST_CASE("signal branch solves to the published s1 prime") {
  VacuumBounds vb = vacuum_bounds(kRef.tally.counting_rate(IntensityClass::Vacuum),
                                  static_cast<double>(kRef.tally.n_sent[0]), 10.0);
  SinglePhotonSolution sol =
      solve_single_photon(kRef.tally, kRef.analysis, vb.s0_high, vb.s0_low);
  CHECK(sol.s1 == doctest::Approx(1.3363105636033106e-6).epsilon(1e-9));
  CHECK(sol.s1_prime == doctest::Approx(1.2788e-6).epsilon(0.005));
  CHECK(sol.s1_prime == doctest::Approx(1.2788441355504408e-6).epsilon(1e-9));
}

TEST_CASE("bisection agrees with the grid oracle on the reference branches") {
  VacuumBounds vb = vacuum_bounds(kRef.tally.counting_rate(IntensityClass::Vacuum),
                                  static_cast<double>(kRef.tally.n_sent[0]), 10.0);
  constexpr int kGrid = 1'000'000;
  for (auto [s0_eq, s0_pr] : {std::pair<double, double>{vb.s0_low, vb.s0_low},
                              std::pair<double, double>{vb.s0_high, vb.s0_low}}) {
    SinglePhotonSolution sol =
        solve_single_photon(kRef.tally, kRef.analysis, s0_eq, s0_pr);
    OracleProblem oracle = oracle_for(kRef.tally, kRef.analysis, s0_eq, s0_pr);
    double grid_root = oracle.grid_scan(kGrid);
    REQUIRE(grid_root >= 0.0);
    CHECK(std::abs(sol.s1 - grid_root) <= oracle.step(kGrid) + 1e-6 * sol.s1);
  }
}

TEST_CASE("degenerate two-photon tally recovers the exact yield") {
  // All multiphoton yield sits at n = 2, where the bound is attained, and
  // multiphoton pulses are error-free so E1 recovers the true e1.
  double y0 = 2e-8, y1 = 1.5e-6, y2 = 9e-6, e1_true = 0.013;
  std::vector<double> yields{y0, y1, y2};
  std::vector<double> errors{0.5, e1_true, 0.0};
  Tally t = poissonian_tally(0.2, 0.6, yields, errors);

  AnalysisConfig cfg = kRef.analysis;
  cfg.n_sigma = 0.0;
  SinglePhotonSolution sol = solve_single_photon(t, cfg, y0, y0);
  CHECK(sol.s1 == doctest::Approx(y1).epsilon(1e-6));

  double s_mu = t.counting_rate(IntensityClass::Decoy);
  double delta1 = single_photon_fraction(sol.s1, cfg.mu, s_mu);
  double delta1_true = y1 * cfg.mu * std::exp(-cfg.mu) / s_mu;
  // Count rounding in the synthetic tally limits the attainable agreement.
  CHECK(delta1 == doctest::Approx(delta1_true).epsilon(1e-7));

  ClampedValue e1 = single_photon_qber(t.e_observed[1], y0, cfg.mu, s_mu, delta1);
  CHECK(e1.value == doctest::Approx(e1_true).epsilon(1e-6));
  CHECK_FALSE(e1.clamped);
}

TEST_CASE("realistic yield curves are lower-bounded, never overestimated") {
  // Threshold-detector yields y_n = 1 - (1 - eta)^n + dark: the solver's s1
  // must stay at or below the true single-photon yield.
  double dark = 1.2e-8, eta = 2.5e-6;
  std::vector<double> yields, errors;
  for (int n = 0; n < 40; ++n) {
    double yield = 1.0 - std::pow(1.0 - eta, n) + dark;
    yields.push_back(yield);
    errors.push_back(0.02);
  }
  Tally t = poissonian_tally(0.2, 0.6, yields, errors);
  AnalysisConfig cfg = kRef.analysis;
  cfg.n_sigma = 0.0;
  SinglePhotonSolution sol = solve_single_photon(t, cfg, yields[0], yields[0]);
  CHECK(sol.s1 <= yields[1] * (1.0 + 1e-6));
  CHECK(sol.s1 > 0.0);
}

TEST_CASE("solver failure modes") {
  Tally t = kRef.tally;
  AnalysisConfig cfg = kRef.analysis;
  // Vacuum rate far above the decoy rate forces a negative multiphoton mass.
  CHECK_THROWS_AS(solve_single_photon(t, cfg, 1.0, 1e-8), AnalysisError);
  CHECK_THROWS_AS(solve_single_photon(t, AnalysisConfig{0.6, 0.2}, 1e-8, 1e-8),
                  AnalysisError);
}

TEST_CASE("single photon fraction reference points") {
  CHECK(single_photon_fraction(1.2788e-6, 0.6, 9.0941e-7) ==
        doctest::Approx(0.46304).epsilon(1e-4));
  CHECK(single_photon_fraction(1.3707e-6, 0.2, 3.12225e-7) ==
        doctest::Approx(0.71887).epsilon(1e-4));
  CHECK(single_photon_fraction(0.0, 0.2, 3.12225e-7) == 0.0);
  // Clamped at 1 for impossible inputs.
  CHECK(single_photon_fraction(1.0, 0.2, 1e-9) == 1.0);
  CHECK_THROWS_AS(single_photon_fraction(1e-6, 0.2, 0.0), std::domain_error);
}

TEST_CASE("single photon qber reference points") {
  CHECK(single_photon_qber(0.02620357523378692, 1.0892575469108494e-8, 0.6,
                           9.094104078989964e-7, 0.4630546579924156)
            .value == doctest::Approx(0.049490584458170374).epsilon(1e-12));
  CHECK(single_photon_qber(0.06328247602330354, 1.0892575469108494e-8, 0.2,
                           3.122248300420848e-7, 0.7188607881074834)
            .value == doctest::Approx(0.06816474470109839).epsilon(1e-12));
  // Numerator exactly cancelled by the dark subtraction.
  double s0_low = 1.0e-8, mu = 0.2, s = 3.0e-7;
  double e_u = s0_low * std::exp(-mu) / (2.0 * s);
  CHECK(single_photon_qber(e_u, s0_low, mu, s, 0.7).value == 0.0);
  ClampedValue below = single_photon_qber(e_u * 0.5, s0_low, mu, s, 0.7);
  CHECK(below.value == 0.0);
  CHECK(below.clamped);
  ClampedValue above = single_photon_qber(0.9, s0_low, mu, s, 0.5);
  CHECK(above.value == 0.5);
  CHECK(above.clamped);
  CHECK_THROWS_AS(single_photon_qber(0.03, s0_low, mu, s, 0.0), AnalysisError);
}

TEST_CASE("key rate reference points and clamping") {
  CHECK(key_rate(9.094104078989964e-7, 0.4630546579924156, 0.0196,
                 0.049490584458170374)
            .value == doctest::Approx(1.7445e-7).epsilon(0.01));
  CHECK(key_rate(3.122248300420848e-7, 0.7188607881074834, 0.0404,
                 0.06816474470109839)
            .value == doctest::Approx(6.7564e-8).epsilon(0.02));
  // Perfect single-photon channel: R = S.
  CHECK(key_rate(1e-6, 1.0, 0.0, 0.0).value == doctest::Approx(1e-6).epsilon(1e-12));
  ClampedValue negative = key_rate(1e-6, 0.4, 0.12, 0.28);
  CHECK(negative.value == 0.0);
  CHECK(negative.clamped);
}

TEST_CASE("key rate is nonincreasing in both error rates") {
  double prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    double e = 0.25 * i / 50.0;
    double r = key_rate(1e-6, 0.5, e, 0.05).value;
    CHECK(r <= prev + 1e-18);
    prev = r;
  }
  prev = 2.0;
  for (int i = 0; i <= 50; ++i) {
    double e1 = 0.5 * i / 50.0;
    double r = key_rate(1e-6, 0.5, 0.02, e1).value;
    CHECK(r <= prev + 1e-18);
    prev = r;
  }
}

TEST_CASE("ec inefficiency lowers the rate") {
  double base = key_rate(9.0941e-7, 0.463, 0.0196, 0.0495, 1.0).value;
  double charged = key_rate(9.0941e-7, 0.463, 0.0196, 0.0495, 1.2).value;
  CHECK(charged < base);
}

TEST_CASE("final key reference points") {
  CHECK(final_key(1.7483628294496323e-7, 494'240'000'000, 0.1, 0.05) ==
        doctest::Approx(36724.710905155414).epsilon(1e-12));
  CHECK(final_key(6.764033645987474e-8, 247'120'000'000, 0.1, 0.05) ==
        doctest::Approx(7103.993977034805).epsilon(1e-12));
  CHECK(final_key(0.0, 1000, 0.1, 0.05) == 0.0);
  CHECK_THROWS_AS(final_key(-1e-9, 1000, 0.1, 0.05), std::domain_error);
}

TEST_CASE("full analysis reproduces the published chain") {
  AnalysisResult r = analyze(kRef.tally, kRef.analysis);
  CHECK(r.bounds.e_u_mup == doctest::Approx(0.0263).epsilon(0.01));
  CHECK(r.bounds.s1 == doctest::Approx(1.370695961688154e-6).epsilon(1e-9));
  CHECK(r.bounds.s1_prime == doctest::Approx(1.2788441355504408e-6).epsilon(1e-9));
  CHECK(r.bounds.delta1_mu == doctest::Approx(0.7188607881074834).epsilon(1e-9));
  CHECK(r.bounds.delta1_mup == doctest::Approx(0.4630546579924156).epsilon(1e-9));
  CHECK(r.bounds.e1_mu == doctest::Approx(0.06816474470109839).epsilon(1e-9));
  CHECK(r.bounds.e1_mup == doctest::Approx(0.049490584458170374).epsilon(1e-9));
  CHECK(r.report.r_mup == doctest::Approx(1.7483628294496323e-7).epsilon(1e-9));
  CHECK(r.report.r_mu == doctest::Approx(6.764033645987474e-8).epsilon(1e-9));
  CHECK(r.report.rate_mup_hz == doctest::Approx(11.888867240257499).epsilon(1e-9));
  CHECK(r.report.rate_mu_hz == doctest::Approx(2.2997714396357414).epsilon(1e-9));
  CHECK(std::abs(r.report.rate_total_hz - 14.1) < 0.3);
  CHECK_FALSE(r.report.clamped_r_mu);
  CHECK_FALSE(r.report.clamped_r_mup);
}

TEST_CASE("high signal QBER clamps the signal key to zero") {
  Tally t = kRef.tally;
  t.e_observed[2] = 0.12;
  AnalysisResult r = analyze(t, kRef.analysis);
  CHECK(r.report.r_mup == 0.0);
  CHECK(r.report.clamped_r_mup);
  CHECK(r.report.k_mup == 0.0);
  // The decoy branch is unaffected by the signal QBER except through E^U.
  CHECK(r.report.r_mu > 0.0);
}

TEST_CASE("zero vacuum counts abort the analysis") {
  Tally t = kRef.tally;
  t.c_received[0] = 0;
  CHECK_THROWS_AS(analyze(t, kRef.analysis), AnalysisError);
}

TEST_CASE("s1 decreases as the fluctuation multiplier grows") {
  double prev = 1.0;
  for (double n_sigma : {0.0, 5.0, 10.0, 15.0}) {
    AnalysisConfig cfg = kRef.analysis;
    cfg.n_sigma = n_sigma;
    VacuumBounds vb = vacuum_bounds(kRef.tally.counting_rate(IntensityClass::Vacuum),
                                    static_cast<double>(kRef.tally.n_sent[0]), n_sigma);
    SinglePhotonSolution sol =
        solve_single_photon(kRef.tally, cfg, vb.s0_low, vb.s0_low);
    CHECK(sol.s1 <= prev);
    prev = sol.s1;
  }
}

TEST_CASE("boundary inputs never produce NaN") {
  rng::Engine engine(rng::Stream(55, rng::StreamPurpose::Aggregate));
  for (int trial = 0; trial < 2000; ++trial) {
    double s = std::pow(10.0, -9.0 + 6.0 * engine.uniform());
    double delta = engine.uniform();
    double e = 0.5 * engine.uniform();
    double e1 = 0.5 * engine.uniform();
    ClampedValue r = key_rate(s, delta, e, e1);
    CHECK(std::isfinite(r.value));
    CHECK(r.value >= 0.0);
    if (delta > 0.0) {
      ClampedValue q = single_photon_qber(e, s * 0.01, 0.2, s, delta);
      CHECK(std::isfinite(q.value));
      CHECK(q.value >= 0.0);
      CHECK(q.value <= 0.5);
    }
  }
}
