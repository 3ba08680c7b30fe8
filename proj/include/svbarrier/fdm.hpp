#pragma once

#include <vector>

#include "svbarrier/domain.hpp"
#include "svbarrier/variance_paths.hpp"

namespace svb {

// Log-price grid with the barrier at the first node and the origin exactly
// on-grid: dx = -xi / m0, x_j = xi + j dx.
struct SpatialGrid {
    double xi = 0.0;
    double dx = 0.0;
    std::size_t origin_index = 0;  // node where x == 0
    std::vector<double> x;
};

SpatialGrid make_spatial_grid(double xi, double x_max, int m0);

struct FdmConfig {
    int m0 = 200;         // nodes between barrier and origin
    double x_max = 0.0;   // upper edge; <= 0 picks one from drift and variance
    int time_refine = 4;  // Crank-Nicolson substeps per variance step
};

// Crank-Nicolson solve of the conditioned one-factor problem. Each variance
// step uses the exact increments (m_k - m_{k-1})/dt and
// (upsilon_k - upsilon_{k-1})/dt as its constant drift and diffusion, so the
// finite-difference solution discretizes the same continuous problem as the
// heat-potential solver.
//
// Backward: absorbing barrier at x_0 = xi, one-sided PDE row at the top.
// Returns the discounted price at x = 0.
double cn_backward_price(const ConditionalCoefficients& coeffs, double dt, double xi,
                         PayoffKind kind, double log_strike, double r, double maturity,
                         double s0, const FdmConfig& cfg = {});

// Forward: Fokker-Planck evolution of a delta mass 1/dx at the origin with
// absorbing edges; the result is the surviving terminal density on the grid.
std::vector<double> cn_forward_green(const ConditionalCoefficients& coeffs, double dt, double xi,
                                     const FdmConfig& cfg, SpatialGrid& grid_out);

// Discounted no-touch price from an already-computed forward density.
double fdm_no_touch_from_green(const SpatialGrid& grid, const std::vector<double>& green,
                               double r, double maturity);

}  // namespace svb
