// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/decoy_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdsim/errors.hpp"
#include "qkdsim/poisson.hpp"

namespace qkd {

AnalysisConfig analysis_config(const ProtocolParams& params) {
  return AnalysisConfig{params.mu,
                        params.mu_prime,
                        params.test_fraction_phase,
                        params.test_fraction_bit,
                        params.n_sigma,
                        params.duration_s,
                        params.ec_efficiency};
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("binary_entropy: argument must lie in [0, 1]");
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double qber_upper_bound(double e_observed, std::int64_t c_received,
                        double test_fraction, double n_sigma) {
  if (e_observed < 0.0) {
    throw std::domain_error("qber_upper_bound: QBER must be >= 0");
  }
  if (e_observed == 0.0) return 0.0;
  double test_bits = static_cast<double>(c_received) * test_fraction;
  if (!(test_bits > 0.0)) {
    throw AnalysisError("qber_upper_bound: EmptyTestSet, C * L_p must be > 0");
  }
  return e_observed + n_sigma * std::sqrt(e_observed / test_bits);
}

VacuumBounds vacuum_bounds(double s0, double n0, double n_sigma) {
  double product = s0 * n0;  // the observed vacuum click count
  if (!(product > 0.0)) {
    throw AnalysisError("vacuum_bounds: ZeroVacuumCounts, S0 * N0 must be > 0");
  }
  VacuumBounds b;
  b.r0 = n_sigma / std::sqrt(product);
  b.clamped = b.r0 >= 1.0;
  b.s0_low = b.clamped ? 0.0 : (1.0 - b.r0) * s0;
  b.s0_high = (1.0 + b.r0) * s0;
  return b;
}

namespace {

// Precomputed constants of the joint-constraint residual.
struct ConstraintContext {
  double s_mu;           // decoy-class counting rate
  double s_mu_prime;     // signal-class counting rate
  double n_mu;           // decoy-class pulse count
  double mu;
  double exp_neg_mu;
  double exp_neg_mup;
  double mu_exp_neg_mu;  // mu e^-mu
  double mup_exp_neg_mup;
  double c_tail;         // 1 - e^-mu - mu e^-mu
  double ratio;          // mu^2 e^-mu / (mu'^2 e^-mu')
  double reduce_1;       // n_sigma e^{mu/2} / sqrt(mu N_mu)
  double reduce_c;       // n_sigma / sqrt(N_mu)
  double s0_eq;
  double s0_prime;
};

ConstraintContext make_context(const Tally& tally, const AnalysisConfig& cfg,
                               double s0_equality, double s0_prime) {
  ConstraintContext ctx{};
  ctx.s_mu = tally.counting_rate(IntensityClass::Decoy);
  ctx.s_mu_prime = tally.counting_rate(IntensityClass::Signal);
  ctx.n_mu = static_cast<double>(tally.n_sent[static_cast<int>(IntensityClass::Decoy)]);
  ctx.mu = cfg.mu;
  ctx.exp_neg_mu = std::exp(-cfg.mu);
  ctx.exp_neg_mup = std::exp(-cfg.mu_prime);
  ctx.mu_exp_neg_mu = cfg.mu * ctx.exp_neg_mu;
  ctx.mup_exp_neg_mup = cfg.mu_prime * ctx.exp_neg_mup;
  ctx.c_tail = multi_photon_tail(cfg.mu);
  ctx.ratio = (cfg.mu * cfg.mu * ctx.exp_neg_mu) /
              (cfg.mu_prime * cfg.mu_prime * ctx.exp_neg_mup);
  ctx.reduce_1 = ctx.n_mu > 0.0
                     ? cfg.n_sigma * std::exp(cfg.mu / 2.0) / std::sqrt(cfg.mu * ctx.n_mu)
                     : 0.0;
  ctx.reduce_c = ctx.n_mu > 0.0 ? cfg.n_sigma / std::sqrt(ctx.n_mu) : 0.0;
  ctx.s0_eq = s0_equality;
  ctx.s0_prime = s0_prime;
  return ctx;
}

double reduced_single(const ConstraintContext& ctx, double s1) {
  if (s1 <= 0.0) return 0.0;
  double factor = 1.0 - ctx.reduce_1 / std::sqrt(s1);
  return factor > 0.0 ? factor * s1 : 0.0;
}

double reduced_multi(const ConstraintContext& ctx, double s_c) {
  if (s_c <= 0.0) return 0.0;
  double factor = 1.0 - ctx.reduce_c / std::sqrt(s_c);
  return factor > 0.0 ? factor * s_c : 0.0;
}

// c s_c from the decoy-class decomposition at a candidate s1.
double multiphoton_mass(const ConstraintContext& ctx, double s1) {
  return ctx.s_mu - ctx.exp_neg_mu * ctx.s0_eq - ctx.mu_exp_neg_mu * s1;
}

// rhs - lhs of the constraint; nonnegative iff s1 is feasible. Increasing in
// s1: the multiphoton mass falls faster than the right side shrinks.
double constraint_margin(const ConstraintContext& ctx, double s1) {
  double lhs = ctx.c_tail * reduced_multi(ctx, multiphoton_mass(ctx, s1) / ctx.c_tail);
  double rhs = ctx.ratio * (ctx.s_mu_prime - ctx.mup_exp_neg_mup * reduced_single(ctx, s1) -
                            ctx.exp_neg_mup * ctx.s0_prime);
  return rhs - lhs;
}

}  // namespace

SinglePhotonSolution solve_single_photon(const Tally& tally, const AnalysisConfig& config,
                                         double s0_equality, double s0_prime) {
  if (!(config.mu > 0.0 && config.mu < config.mu_prime)) {
    throw AnalysisError("solve_single_photon: requires 0 < mu < mu_prime");
  }
  ConstraintContext ctx = make_context(tally, config, s0_equality, s0_prime);

  // s_c >= 0 bounds the search from above.
  double s1_max = multiphoton_mass(ctx, 0.0) / ctx.mu_exp_neg_mu;
  if (s1_max < 0.0) {
    throw AnalysisError(
        "solve_single_photon: NegativeSc, decomposition forces s_c < 0");
  }

  SinglePhotonSolution sol;
  double lo = 0.0;
  double hi = s1_max;
  if (constraint_margin(ctx, lo) >= 0.0) {
    hi = lo;  // already feasible at zero
  } else if (constraint_margin(ctx, hi) < 0.0) {
    throw AnalysisError("solve_single_photon: Infeasible, no s1 satisfies the constraint");
  } else {
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      if (constraint_margin(ctx, mid) >= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
      ++sol.iterations;
    }
  }

  sol.s1 = hi;  // smallest point known to be feasible
  sol.s1_prime = reduced_single(ctx, sol.s1);
  sol.s_c = std::max(0.0, multiphoton_mass(ctx, sol.s1)) / ctx.c_tail;

  double lhs = ctx.c_tail * reduced_multi(ctx, sol.s_c);
  double rhs = ctx.ratio * (ctx.s_mu_prime - ctx.mup_exp_neg_mup * sol.s1_prime -
                            ctx.exp_neg_mup * ctx.s0_prime);
  double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  sol.residual_rel = std::abs(rhs - lhs) / scale;
  return sol;
}

double single_photon_fraction(double s1_branch, double mu_value, double s_value) {
  if (!(s_value > 0.0)) {
    throw std::domain_error("single_photon_fraction: counting rate must be > 0");
  }
  double delta = s1_branch * mu_value * std::exp(-mu_value) / s_value;
  return std::clamp(delta, 0.0, 1.0);
}

ClampedValue single_photon_qber(double e_upper, double s0_low, double mu_value,
                                double s_value, double delta1) {
  if (!(delta1 > 0.0)) {
    throw AnalysisError("single_photon_qber: ZeroDelta, single-photon fraction is 0");
  }
  double dark_term = s0_low * std::exp(-mu_value) / (2.0 * s_value);
  double e1 = (e_upper - dark_term) / delta1;
  if (e1 < 0.0) return {0.0, true};
  if (e1 > 0.5) return {0.5, true};
  return {e1, false};
}

ClampedValue key_rate(double s_value, double delta1, double e_observed, double e1,
                      double ec_efficiency) {
  double r = s_value * (delta1 - ec_efficiency * binary_entropy(e_observed) -
                        delta1 * binary_entropy(e1));
  if (r < 0.0) return {0.0, true};
  return {r, false};
}

double final_key(double rate, std::int64_t n_class, double lp, double lb) {
  if (rate < 0.0) {
    throw std::domain_error("final_key: rate must be >= 0");
  }
  return 0.5 * (1.0 - lp - lb) * rate * static_cast<double>(n_class);
}

AnalysisResult analyze(const Tally& tally, const AnalysisConfig& config) {
  validate_tally_or_throw(tally);

  constexpr int kDecoy = static_cast<int>(IntensityClass::Decoy);
  constexpr int kSignal = static_cast<int>(IntensityClass::Signal);

  double s0 = tally.counting_rate(IntensityClass::Vacuum);
  double s_mu = tally.counting_rate(IntensityClass::Decoy);
  double s_mup = tally.counting_rate(IntensityClass::Signal);
  double n0 = static_cast<double>(tally.n_sent[static_cast<int>(IntensityClass::Vacuum)]);

  AnalysisResult result;
  SecurityBounds& b = result.bounds;
  SecurityReport& rep = result.report;

  VacuumBounds vb = vacuum_bounds(s0, n0, config.n_sigma);
  b.r0 = vb.r0;
  b.s0_low = vb.s0_low;
  b.s0_high = vb.s0_high;

  b.e_u_mu = qber_upper_bound(tally.e_observed[kDecoy], tally.c_received[kDecoy],
                              config.test_fraction_phase, config.n_sigma);
  b.e_u_mup = qber_upper_bound(tally.e_observed[kSignal], tally.c_received[kSignal],
                               config.test_fraction_phase, config.n_sigma);

  // Decoy branch: the fixed-s0 method with s0 = (1 - r0) S0 throughout.
  try {
    SinglePhotonSolution decoy =
        solve_single_photon(tally, config, vb.s0_low, vb.s0_low);
    result.solver_iterations_decoy = decoy.iterations;
    result.residual_decoy = decoy.residual_rel;
    b.s1 = decoy.s1;
    b.s_c = decoy.s_c;

    b.delta1_mu = single_photon_fraction(decoy.s1, config.mu, s_mu);
    ClampedValue e1 = single_photon_qber(b.e_u_mu, vb.s0_low, config.mu, s_mu, b.delta1_mu);
    b.e1_mu = e1.value;
    rep.clamped_e1_mu = e1.clamped;

    ClampedValue r = key_rate(s_mu, b.delta1_mu, tally.e_observed[kDecoy], b.e1_mu,
                              config.ec_efficiency);
    rep.r_mu = r.value;
    rep.clamped_r_mu = r.clamped;
    rep.k_mu = final_key(rep.r_mu, tally.n_sent[kDecoy], config.test_fraction_phase,
                         config.test_fraction_bit);
  } catch (const Error& e) {
    result.note_mu = e.what();
    rep.r_mu = 0.0;
    rep.k_mu = 0.0;
    rep.clamped_r_mu = true;
  }

  // Signal branch: two-step worst case, s0 = (1 + r0) S0 in the decomposition
  // and (1 - r0) S0 on the right side.
  try {
    SinglePhotonSolution signal =
        solve_single_photon(tally, config, vb.s0_high, vb.s0_low);
    result.solver_iterations_signal = signal.iterations;
    result.residual_signal = signal.residual_rel;
    b.s1_prime = signal.s1_prime;

    b.delta1_mup = single_photon_fraction(signal.s1_prime, config.mu_prime, s_mup);
    ClampedValue e1 =
        single_photon_qber(b.e_u_mup, vb.s0_low, config.mu_prime, s_mup, b.delta1_mup);
    b.e1_mup = e1.value;
    rep.clamped_e1_mup = e1.clamped;

    ClampedValue r = key_rate(s_mup, b.delta1_mup, tally.e_observed[kSignal], b.e1_mup,
                              config.ec_efficiency);
    rep.r_mup = r.value;
    rep.clamped_r_mup = r.clamped;
    rep.k_mup = final_key(rep.r_mup, tally.n_sent[kSignal], config.test_fraction_phase,
                          config.test_fraction_bit);
  } catch (const Error& e) {
    result.note_mup = e.what();
    rep.r_mup = 0.0;
    rep.k_mup = 0.0;
    rep.clamped_r_mup = true;
  }

  if (config.duration_s > 0.0) {
    rep.rate_mu_hz = rep.k_mu / config.duration_s;
    rep.rate_mup_hz = rep.k_mup / config.duration_s;
    rep.rate_total_hz = rep.rate_mu_hz + rep.rate_mup_hz;
  }
  return result;
}

}  // namespace qkd
