#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "svbarrier/domain.hpp"

namespace svb {

// Deterministic per-path substream: the generator state depends only on
// (master_seed, path_index, stream), never on execution order, so parallel
// runs are bit-reproducible. Stream 0 drives the variance shocks, stream 1
// the independent spot shocks of the 2D simulation.
class PathRng {
  public:
    PathRng(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t stream = 0);

    double uniform();  // (0, 1]
    double normal();   // standard normal, Box-Muller pair cached

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// One discretized variance trajectory on the homogeneous grid t_k = k*dt.
struct VariancePath {
    double dt;
    std::vector<double> v;  // v_0..v_K, raw (may dip below zero; truncated in use)
    std::vector<double> i;  // trapezoid integral of max(v, 0)
    std::vector<double> t;
};

// Conditional drift/diffusion of the log-price given the variance path, plus
// the scaled clock upsilon = (1 - rho^2) * I under which the conditioned
// process is a standard Brownian motion.
struct ConditionalCoefficients {
    std::vector<double> mu;       // pointwise drift; mu[0] omits the dV/dt term
    std::vector<double> nu;       // sqrt(1 - rho^2) * sqrt(v+)
    std::vector<double> m;        // cumulative drift, m[0] = 0
    std::vector<double> upsilon;  // scaled clock, strictly increasing
    double big_upsilon;
};

// Euler step with full truncation: v+ = max(v, 0) inside drift, diffusion
// and the integral. literal_euler drops the sqrt(v) factor in the diffusion
// term (the arithmetic variant kept for A/B comparison only).
VariancePath simulate_variance_path(const HestonParams& p, double maturity, int k_steps,
                                    PathRng& rng, bool literal_euler = false);

ConditionalCoefficients conditional_coeffs(const VariancePath& path, const HestonParams& p);

// (I_T, J_T): integrated variance and the variance-driving Brownian integral
// int sqrt(V) dB, the latter recovered from the pathwise identity
// J_T = (v_K - v_0 - kappa*theta*T + kappa*I_K) / epsilon.
std::pair<double, double> terminal_functionals(const VariancePath& path, const HestonParams& p);

}  // namespace svb
