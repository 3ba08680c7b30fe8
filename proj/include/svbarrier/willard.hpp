#pragma once

#include "svbarrier/domain.hpp"
#include "svbarrier/variance_paths.hpp"

namespace svb {

// Conditioning on the variance path makes the terminal spot log-normal, so a
// vanilla reduces to Black-Scholes on an adjusted spot and volatility.
struct ConditionalVanillaInputs {
    double eff_spot;  // s0 * exp(-rho^2 I_T / 2 + rho J_T)
    double eff_vol;   // sqrt(1 - rho^2) * sqrt(I_T / T)
};

ConditionalVanillaInputs conditional_inputs(double i_T, double j_T, const HestonParams& p,
                                            double maturity);

double conditional_call(double i_T, double j_T, const HestonParams& p, double strike,
                        double maturity);
double conditional_put(double i_T, double j_T, const HestonParams& p, double strike,
                       double maturity);

// Averages the conditional price over simulated variance paths.
PricingResult willard_mc_price(const HestonParams& p, const VanillaContract& c, long n_paths,
                               std::uint64_t seed, int k_steps = 52);

}  // namespace svb
