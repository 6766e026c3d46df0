// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace qkd {

double poisson_pmf(double mu, int n) {
  if (mu < 0.0 || std::isnan(mu)) {
    throw std::domain_error("poisson_pmf: mean must be >= 0");
  }
  if (n < 0) {
    throw std::domain_error("poisson_pmf: photon count must be >= 0");
  }
  if (mu == 0.0) {
    return n == 0 ? 1.0 : 0.0;
  }
  // log-space form stays finite for large n.
  return std::exp(n * std::log(mu) - mu - std::lgamma(n + 1.0));
}

double multi_photon_tail(double mu) {
  if (mu < 0.0 || std::isnan(mu)) {
    throw std::domain_error("multi_photon_tail: mean must be >= 0");
  }
  // (1 - e^-mu) - mu e^-mu, with expm1 keeping the small-mu difference accurate.
  return -std::expm1(-mu) - mu * std::exp(-mu);
}

}  // namespace qkd
