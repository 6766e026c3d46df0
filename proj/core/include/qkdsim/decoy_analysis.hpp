// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "qkdsim/params.hpp"
#include "qkdsim/tally.hpp"

namespace qkd {

// Inputs the security analysis actually consumes.
struct AnalysisConfig {
  double mu = 0.2;
  double mu_prime = 0.6;
  double test_fraction_phase = 0.10;  // L^p
  double test_fraction_bit = 0.05;    // L^b
  double n_sigma = 10.0;
  double duration_s = 3089.0;
  double ec_efficiency = 1.0;
};

AnalysisConfig analysis_config(const ProtocolParams& params);

// H(x) = -x log2 x - (1-x) log2(1-x), with H(0) = H(1) = 0.
// Throws std::domain_error outside [0, 1].
double binary_entropy(double x);

// Fluctuation-corrected QBER upper bound over a finite test set:
// E + n_sigma * sqrt(E / (C * L_p)). Throws AnalysisError (EmptyTestSet)
// when C * L_p = 0, unless E = 0 (the fluctuation term vanishes).
double qber_upper_bound(double e_observed, std::int64_t c_received,
                        double test_fraction, double n_sigma);

struct VacuumBounds {
  double r0 = 0.0;       // n_sigma / sqrt(S0 * N0)
  double s0_low = 0.0;   // (1 - r0) S0, clamped at 0
  double s0_high = 0.0;  // (1 + r0) S0
  bool clamped = false;  // r0 >= 1 forced the lower bound to 0
};

// Throws AnalysisError (ZeroVacuumCounts) when S0 * N0 = 0.
VacuumBounds vacuum_bounds(double s0, double n0, double n_sigma);

// Joint-constraint solution for the single-photon counting rate.
//
// With s_c eliminated through the decoy-class decomposition
//   S_mu = e^-mu s0_eq + mu e^-mu s1 + c s_c        (s_c >= 0 required)
// the returned s1 is the smallest value for which
//   c s'_c <= (mu^2 e^-mu / mu'^2 e^-mu') (S_mu' - mu' e^-mu' s'_1 - e^-mu' s0_prime)
// holds, where the finite-sample reductions are
//   s'_1 = (1 - n_sigma e^{mu/2} / sqrt(mu s1 N_mu)) s1
//   s'_c = (1 - n_sigma / sqrt(s_c N_mu)) s_c
// with each factor clamped at 0. At the root the constraint is tight within
// the solver tolerance.
struct SinglePhotonSolution {
  double s1 = 0.0;        // root
  double s1_prime = 0.0;  // finite-sample reduction of the root
  double s_c = 0.0;       // multiphoton-class counting rate at the root
  int iterations = 0;
  double residual_rel = 0.0;  // |constraint residual| / max(lhs, rhs) at the root
};

// Throws AnalysisError: NegativeSc when the decomposition forces s_c < 0 at
// every candidate, Infeasible when no s1 in range satisfies the constraint.
SinglePhotonSolution solve_single_photon(const Tally& tally, const AnalysisConfig& config,
                                         double s0_equality, double s0_prime);

// Delta_1 = s1_branch * mu e^-mu / S, clamped to [0, 1].
double single_photon_fraction(double s1_branch, double mu_value, double s_value);

struct ClampedValue {
  double value = 0.0;
  bool clamped = false;
};

// E_1 = (E_upper - s0_low e^-mu / (2 S)) / Delta_1, clamped to [0, 0.5].
// Throws AnalysisError (ZeroDelta) when delta1 = 0.
ClampedValue single_photon_qber(double e_upper, double s0_low, double mu_value,
                                double s_value, double delta1);

// R = S [Delta_1 - f_ec H(E) - Delta_1 H(E_1)], clamped at 0.
ClampedValue key_rate(double s_value, double delta1, double e_observed, double e1,
                      double ec_efficiency = 1.0);

// K = 1/2 (1 - L_p - L_b) R N; the 1/2 charges the basis-mismatch discard.
double final_key(double rate, std::int64_t n_class, double lp, double lb);

// Every intermediate of the bound chain.
struct SecurityBounds {
  double r0 = 0.0;
  double s0_low = 0.0;
  double s0_high = 0.0;
  double e_u_mu = 0.0;    // fluctuation-corrected QBER bound, decoy class
  double e_u_mup = 0.0;   // signal class
  double s1 = 0.0;        // decoy-branch root
  double s1_prime = 0.0;  // signal-branch reduced rate
  double s_c = 0.0;       // decoy-branch multiphoton rate
  double delta1_mu = 0.0;
  double delta1_mup = 0.0;
  double e1_mu = 0.0;
  double e1_mup = 0.0;
};

struct SecurityReport {
  double r_mup = 0.0;  // bits per emitted signal pulse
  double r_mu = 0.0;
  double k_mup = 0.0;  // final key counts
  double k_mu = 0.0;
  double rate_mup_hz = 0.0;
  double rate_mu_hz = 0.0;
  double rate_total_hz = 0.0;
  bool clamped_r_mup = false;
  bool clamped_r_mu = false;
  bool clamped_e1_mup = false;
  bool clamped_e1_mu = false;
};

struct AnalysisResult {
  SecurityBounds bounds;
  SecurityReport report;
  int solver_iterations_decoy = 0;
  int solver_iterations_signal = 0;
  double residual_decoy = 0.0;
  double residual_signal = 0.0;
  // Set when a branch failed; that class's key is reported as 0.
  std::string note_mu;
  std::string note_mup;
};

// Full chain: vacuum bounds, QBER bounds, both solver branches (signal:
// s0_equality = s0_high with s0_prime = s0_low; decoy: s0_low in both
// places), fractions, single-photon QBERs, rates and key counts.
// A failed branch zeroes that class's key and records a diagnostic note.
AnalysisResult analyze(const Tally& tally, const AnalysisConfig& config);

}  // namespace qkd
