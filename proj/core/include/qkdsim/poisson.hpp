// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace qkd {

// P(n photons | mean mu) = e^-mu mu^n / n!.
// Throws std::domain_error for mu < 0 or n < 0.
double poisson_pmf(double mu, int n);

// Total weight of the multiphoton component: 1 - e^-mu - mu e^-mu.
// Equals the sum of poisson_pmf(mu, n) over n >= 2.
double multi_photon_tail(double mu);

}  // namespace qkd
