#pragma once

#include "svbarrier/domain.hpp"

namespace svb {

double norm_cdf(double x);
double norm_pdf(double x);

// Controls the Fourier-inversion integral over the transform variable chi.
// The integration range is extended past chi_max until the last panel
// contributes less than tol.
struct QuadratureSpec {
    double chi_max = 200.0;
    int n_nodes = 2000;
    double tol = 1e-10;
};

// Black-Scholes call; sigma = 0 returns the deterministic forward payoff.
double bs_call(double s0, double strike, double maturity, double r, double sigma);
double bs_put(double s0, double strike, double maturity, double r, double sigma);
double bs_vega(double s0, double strike, double maturity, double r, double sigma);

// Same price via the Fourier representation of the log-strike integrand.
double bs_call_fourier(double s0, double strike, double maturity, double r, double sigma,
                       const QuadratureSpec& q = {});

// Semi-closed-form call under the square-root stochastic variance model
// (Lewis-Lipton integral form of the characteristic function).
double lewis_lipton_call(const HestonParams& p, double strike, double maturity,
                         const QuadratureSpec& q = {});

// Bisection inversion of bs_call on sigma in [1e-6, 5], |price error| <= 1e-10.
double implied_vol(double price, double s0, double strike, double maturity, double r);

}  // namespace svb
