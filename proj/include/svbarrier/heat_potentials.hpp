#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "svbarrier/domain.hpp"

namespace svb {

// exp(-y^2 / 2u) / sqrt(2 pi u)
double heat_kernel(double u, double y);

// Piecewise-linear cumulative drift N on the scaled clock upsilon. The
// barrier seen by the conditioned Brownian motion sits at xi - N(upsilon).
struct MovingBoundary {
    std::vector<double> nodes;  // strictly increasing, nodes.front() == 0
    std::vector<double> n;      // n.front() == 0

    double operator()(double u) const;       // linear interpolation
    MovingBoundary refined(int factor) const;  // uniform subdivision per interval
};

enum class RhsKind { GreenBoundary, NoTouchBackward, CallBackward, Custom };

struct VolterraSolution {
    std::vector<double> grid;
    std::vector<double> phi;
    RhsKind rhs_kind = RhsKind::Custom;
};

// Product-trapezoid weight for the 1/sqrt(u_k - u') factor:
// Pi_{k,l} = (u_l - u_{l-1}) / (sqrt(u_k - u_{l-1}) + sqrt(u_k - u_l)).
//
// Solves phi(u) + int_0^u K(u, u') / sqrt(u - u') phi(u') du' = f(u) by the
// induction phi_0 = f_0,
// phi_k = (f_k - sqrt(D_{k,k-1}) K_{k,k-1} phi_{k-1}
//          - sum_{l<k} Pi_{k,l} (K_{k,l} phi_l + K_{k,l-1} phi_{l-1}))
//         / (1 + sqrt(D_{k,k-1}) K_{k,k}).
template <class Kernel>
std::vector<double> solve_volterra_with(const Kernel& kern, std::span<const double> f,
                                        std::span<const double> grid) {
    const std::size_t n = grid.size();
    if (f.size() != n) throw InvalidParam("f", "rhs and grid size mismatch");
    std::vector<double> phi(n);
    if (n == 0) return phi;
    phi[0] = f[0];
    for (std::size_t k = 1; k < n; ++k) {
        const double sq_last = std::sqrt(grid[k] - grid[k - 1]);
        double acc = f[k] - sq_last * kern(k, k - 1) * phi[k - 1];
        for (std::size_t l = 1; l + 1 <= k; ++l) {
            const double w = (grid[l] - grid[l - 1]) /
                             (std::sqrt(grid[k] - grid[l - 1]) + std::sqrt(grid[k] - grid[l]));
            acc -= w * (kern(k, l) * phi[l] + kern(k, l - 1) * phi[l - 1]);
        }
        const double denom = 1.0 + sq_last * kern(k, k);
        if (std::abs(denom) < 1e-12)
            throw SingularDenominator("Volterra induction denominator vanished");
        phi[k] = acc / denom;
    }
    return phi;
}

// Kernel Theta * Xi / sqrt(2 pi) built from boundary values on the grid;
// the diagonal uses the one-sided backward difference of the drift.
class BoundaryKernel {
  public:
    BoundaryKernel(std::span<const double> grid, std::span<const double> nvals);
    double theta(std::size_t k, std::size_t l) const;
    double operator()(std::size_t k, std::size_t l) const;

  private:
    std::span<const double> grid_, n_;
};

VolterraSolution solve_volterra(const BoundaryKernel& kern, std::span<const double> f,
                                std::span<const double> grid, RhsKind kind = RhsKind::Custom);

// Product-trapezoid evaluation of int_0^U g(u') / sqrt(U - u') du' where U is
// the last grid node and g carries the bounded part of the integrand.
double weakly_singular_integral(std::span<const double> grid, std::span<const double> g);

// f_k = H(u_k, xi - N_{u_k}); f_0 = 0 (the continuous limit for xi != 0).
std::vector<double> boundary_rhs_green(const MovingBoundary& b, double xi);

enum class InnerMode { Forward, Backward };

// One conditioned inner solve: Green's function with an absorbing moving
// boundary, plus no-touch / down-and-out prices from it. Forward mode works
// with the terminal-density potential; Backward mode time-reverses the
// boundary and prices by backward induction. Kernels and potential densities
// are cached, so repricing across strikes reuses the boundary machinery.
class MhpSolver {
  public:
    MhpSolver(const MovingBoundary& b, double xi, int refine = 4);

    double big_upsilon() const { return u_.back(); }
    const std::vector<double>& grid() const { return u_; }
    const VolterraSolution& green_density();  // phi for the boundary rhs

    // Terminal-density values at log-price points x (x <= xi gives 0).
    std::vector<double> green(std::span<const double> x);

    double no_touch(double r, double maturity, InnerMode mode);
    double barrier_call(double log_strike, double r, double maturity, double s0, InnerMode mode,
                        bool literal_backward_rhs = false);
    double barrier_put(double log_strike, double r, double maturity, double s0);  // backward only

  private:
    double survival_forward();
    double survival_backward();
    const std::vector<double>& psi_no_touch();
    double backward_barrier_payoff(std::span<const double> rhs);

    std::vector<double> u_, n_;  // refined forward grid and drift
    std::vector<double> w_, o_;  // reversed clock and drift, w_0 = 0, o_0 = N(Upsilon)
    double xi_;
    VolterraSolution phi_green_;
    std::vector<double> psi_nt_;
    bool have_phi_ = false, have_psi_nt_ = false;
};

// Convenience wrappers over a throwaway solver.
std::vector<double> green_function(const MovingBoundary& b, double xi,
                                   std::span<const double> x, int refine = 4);
double no_touch_price(const MovingBoundary& b, double xi, double r, double maturity,
                      InnerMode mode, int refine = 4);
double barrier_call_price(const MovingBoundary& b, double xi, double log_strike, double r,
                          double maturity, double s0, InnerMode mode, int refine = 4);

// Closed forms for a linear boundary (constant drift lambda): the potential
// density and the image-formula Green's function. Both serve as oracles for
// the discrete machinery.
double constant_drift_phi(double u, double xi, double lambda);
double constant_drift_green(double maturity, double x, double xi, double lambda);

}  // namespace svb
