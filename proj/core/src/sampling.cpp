// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd::rng {

namespace {

// Sequential CDF inversion, exact for any n when n*p is small. Expected
// iteration count is n*p + O(sqrt(n*p)).
std::int64_t binomial_inversion(Engine& engine, std::int64_t n, double p) {
  double n_d = static_cast<double>(n);
  double q = 1.0 - p;
  double r = p / q;
  double pdf = std::exp(n_d * std::log1p(-p));  // P(X = 0)
  double u = engine.uniform();
  std::int64_t k = 0;
  while (u > pdf && k < n) {
    u -= pdf;
    pdf *= (n_d - static_cast<double>(k)) * r / (static_cast<double>(k) + 1.0);
    ++k;
  }
  return k;
}

// BTRS transformed rejection (Hormann, "The generation of binomial random
// variates", J. Stat. Comput. Simul. 46, 1993). Requires p <= 0.5 and
// n*p >= 10.
std::int64_t binomial_btrs(Engine& engine, std::int64_t n, double p) {
  double n_d = static_cast<double>(n);
  double q = 1.0 - p;
  double spq = std::sqrt(n_d * p * q);

  double b = 1.15 + 2.53 * spq;
  double a = -0.0873 + 0.0248 * b + 0.01 * p;
  double c = n_d * p + 0.5;
  double v_r = 0.92 - 4.2 / b;

  double alpha = (2.83 + 5.1 / b) * spq;
  double lpq = std::log(p / q);
  double m = std::floor((n_d + 1.0) * p);  // mode
  double h = std::lgamma(m + 1.0) + std::lgamma(n_d - m + 1.0);

  for (;;) {
    double u = engine.uniform() - 0.5;
    double v = engine.uniform_positive();
    double us = 0.5 - std::abs(u);
    double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > n_d) continue;
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::int64_t>(k);
    }
    double v_scaled = std::log(v * alpha / (a / (us * us) + b));
    double accept = h - std::lgamma(k + 1.0) - std::lgamma(n_d - k + 1.0) +
                    (k - m) * lpq;
    if (v_scaled <= accept) {
      return static_cast<std::int64_t>(k);
    }
  }
}

}  // namespace

std::int64_t binomial(Engine& engine, std::int64_t n, double p) {
  if (n < 0) throw std::domain_error("binomial: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial: p must be in [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  bool mirrored = p > 0.5;
  double p_small = mirrored ? 1.0 - p : p;
  double mean = static_cast<double>(n) * p_small;

  std::int64_t k = mean < 10.0 ? binomial_inversion(engine, n, p_small)
                               : binomial_btrs(engine, n, p_small);
  return mirrored ? n - k : k;
}

std::vector<std::int64_t> multinomial(Engine& engine, std::int64_t n,
                                      const std::vector<double>& probs) {
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::domain_error("multinomial: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::domain_error("multinomial: probabilities must sum to 1");
  }

  std::vector<std::int64_t> counts(probs.size(), 0);
  std::int64_t remaining = n;
  double mass = 1.0;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    double conditional = mass > 0.0 ? probs[i] / mass : 1.0;
    if (conditional > 1.0) conditional = 1.0;
    counts[i] = binomial(engine, remaining, conditional);
    remaining -= counts[i];
    mass -= probs[i];
  }
  if (!probs.empty()) counts.back() = remaining;
  return counts;
}

}  // namespace qkd::rng
