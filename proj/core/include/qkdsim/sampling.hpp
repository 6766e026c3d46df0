// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "qkdsim/rng.hpp"

namespace qkd::rng {

// Exact Binomial(n, p) sampling. Sequential CDF inversion when n*min(p,1-p)
// is small, the BTRS transformed-rejection scheme (Hormann 1993) otherwise.
// Handles n up to ~9e18 (counts and means carried in doubles internally).
// Throws std::domain_error for n < 0 or p outside [0,1].
std::int64_t binomial(Engine& engine, std::int64_t n, double p);

// Splits n into one count per probability via conditional binomials.
// probs must sum to 1 within 1e-9.
std::vector<std::int64_t> multinomial(Engine& engine, std::int64_t n,
                                      const std::vector<double>& probs);

}  // namespace qkd::rng
