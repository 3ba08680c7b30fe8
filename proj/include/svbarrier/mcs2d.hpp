#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svbarrier/domain.hpp"

namespace svb {

struct Mcs2dConfig {
    long n_paths = 100000;
    int k_steps = 52;
    std::uint64_t seed = 1;
    bool bridge = true;  // Brownian-bridge one-step crossing correction
};

// Joint Euler simulation of spot and variance. The variance shocks come from
// the same per-path stream as the variance-only simulator, so runs with equal
// (seed, path index) see identical variance paths; the extra spot shocks live
// on a second stream. The bridge correction weights each surviving path by
// the probability that no intra-step excursion crossed the barrier.
PricingResult mc2d_barrier_price(const HestonParams& p, const BarrierContract& c,
                                 const Mcs2dConfig& cfg);

// Down-and-out calls sharing one barrier, evaluated on shared simulated
// paths; one result per strike.
std::vector<PricingResult> mc2d_call_strip(const HestonParams& p, double barrier,
                                           std::span<const double> strikes, double maturity,
                                           const Mcs2dConfig& cfg);

}  // namespace svb
