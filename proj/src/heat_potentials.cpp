#include "svbarrier/heat_potentials.hpp"

#include <algorithm>
#include <cmath>

#include "svbarrier/vanilla_analytic.hpp"

namespace svb {

namespace {
constexpr double kSqrt2Pi = 2.50662827463100050242;
}

double heat_kernel(double u, double y) {
    if (!(u > 0.0)) throw InvalidParam("u", "heat kernel needs u > 0");
    return std::exp(-y * y / (2.0 * u)) / (kSqrt2Pi * std::sqrt(u));
}

double MovingBoundary::operator()(double u) const {
    if (nodes.size() < 2) throw InvalidParam("boundary", "needs at least two nodes");
    if (u <= nodes.front()) return n.front();
    if (u >= nodes.back()) return n.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), u);
    const std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    const double w = (u - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]);
    return n[hi - 1] + w * (n[hi] - n[hi - 1]);
}

MovingBoundary MovingBoundary::refined(int factor) const {
    if (factor < 1) throw InvalidParam("factor", "refinement factor must be >= 1");
    if (nodes.size() != n.size() || nodes.size() < 2)
        throw InvalidParam("boundary", "nodes/values mismatch or too short");
    MovingBoundary out;
    out.nodes.reserve((nodes.size() - 1) * factor + 1);
    out.n.reserve(out.nodes.capacity());
    out.nodes.push_back(nodes.front());
    out.n.push_back(n.front());
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        const double du = nodes[k] - nodes[k - 1];
        if (!(du > 0.0)) throw InvalidParam("boundary", "nodes must be strictly increasing");
        for (int j = 1; j <= factor; ++j) {
            const double w = static_cast<double>(j) / factor;
            out.nodes.push_back(j == factor ? nodes[k] : nodes[k - 1] + w * du);
            out.n.push_back(j == factor ? n[k] : n[k - 1] + w * (n[k] - n[k - 1]));
        }
    }
    return out;
}

BoundaryKernel::BoundaryKernel(std::span<const double> grid, std::span<const double> nvals)
    : grid_(grid), n_(nvals) {
    if (grid_.size() != n_.size() || grid_.size() < 2)
        throw InvalidParam("kernel", "grid/drift mismatch or too short");
}

double BoundaryKernel::theta(std::size_t k, std::size_t l) const {
    if (k == l) {
        // One-sided difference of the drift at the node.
        const std::size_t a = k > 0 ? k - 1 : 1;
        return -(n_[k] - n_[a]) / (grid_[k] - grid_[a]);
    }
    return -(n_[k] - n_[l]) / (grid_[k] - grid_[l]);
}

double BoundaryKernel::operator()(std::size_t k, std::size_t l) const {
    const double th = theta(k, l);
    const double s = grid_[k] - grid_[l];
    const double xi = s > 0.0 ? std::exp(-0.5 * s * th * th) : 1.0;
    return th * xi / kSqrt2Pi;
}

VolterraSolution solve_volterra(const BoundaryKernel& kern, std::span<const double> f,
                                std::span<const double> grid, RhsKind kind) {
    VolterraSolution sol;
    sol.grid.assign(grid.begin(), grid.end());
    sol.phi = solve_volterra_with(kern, f, grid);
    sol.rhs_kind = kind;
    return sol;
}

double weakly_singular_integral(std::span<const double> grid, std::span<const double> g) {
    if (grid.size() != g.size() || grid.size() < 2)
        throw InvalidParam("grid", "integrand/grid mismatch or too short");
    const std::size_t last = grid.size() - 1;
    double acc = 0.0;
    for (std::size_t l = 1; l <= last; ++l) {
        const double w = (grid[l] - grid[l - 1]) /
                         (std::sqrt(grid[last] - grid[l - 1]) + std::sqrt(grid[last] - grid[l]));
        acc += w * (g[l] + g[l - 1]);
    }
    return acc;
}

std::vector<double> boundary_rhs_green(const MovingBoundary& b, double xi) {
    std::vector<double> f(b.nodes.size());
    f[0] = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k)
        f[k] = heat_kernel(b.nodes[k], xi - b.n[k]);
    return f;
}

MhpSolver::MhpSolver(const MovingBoundary& b, double xi, int refine) : xi_(xi) {
    if (!(xi < 0.0)) throw InvalidParam("xi", "log-barrier must be negative");
    if (b.nodes.empty() || b.nodes.front() != 0.0 || b.n.front() != 0.0)
        throw InvalidParam("boundary", "clock must start at 0 with zero drift");
    const MovingBoundary fine = b.refined(refine);
    u_ = fine.nodes;
    n_ = fine.n;
    const std::size_t m = u_.size();
    const double big = u_.back();
    w_.resize(m);
    o_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        w_[j] = big - u_[m - 1 - j];
        o_[j] = n_[m - 1 - j];
    }
    w_[0] = 0.0;
}

const VolterraSolution& MhpSolver::green_density() {
    if (!have_phi_) {
        MovingBoundary fine{u_, n_};
        const std::vector<double> f = boundary_rhs_green(fine, xi_);
        BoundaryKernel kern(u_, n_);
        phi_green_ = solve_volterra(kern, f, u_, RhsKind::GreenBoundary);
        have_phi_ = true;
    }
    return phi_green_;
}

std::vector<double> MhpSolver::green(std::span<const double> x) {
    const std::vector<double>& phi = green_density().phi;
    const std::size_t last = u_.size() - 1;
    const double big = u_.back();
    const double n_big = n_.back();
    const double sq_big = std::sqrt(big);
    // Drift slope at the terminal node, for the boundary-layer expansion.
    const double np = (n_[last] - n_[last - 1]) / (u_[last] - u_[last - 1]);
    // Direct quadrature resolves the layer once the Gaussian peak (at
    // s ~ z^2/3) spans many cells of the terminal grid spacing.
    const double z_split = 8.0 * std::sqrt(big - u_[last - 1]);
    const double s1 = big - u_[last - 1];
    const double s2 = big - u_[last - 2];
    BoundaryKernel kern(u_, n_);

    std::vector<double> g(last + 1), out(x.size());
    for (std::size_t p = 0; p < x.size(); ++p) {
        const double xp = x[p];
        if (xp <= xi_) {
            out[p] = 0.0;
            continue;
        }
        const double y = xp - n_big;   // heat coordinate of the evaluation point
        const double z = xp - xi_;     // distance above the barrier

        // The layer integrand d/s^{3/2} * exp(-d^2/2s) with d = z + s*Theta
        // concentrates at s -> 0 for small z. Far from the barrier the peak
        // sits many cells inside the grid and the product trapezoid resolves
        // it directly; the regularized split below would also overflow there
        // because its anchor grows like exp(z * n').
        if (z > z_split) {
            for (std::size_t l = 0; l < last; ++l) {
                const double s = big - u_[l];
                const double th = kern.theta(last, l);
                const double d = z + s * th;
                g[l] = (d / s) * std::exp(-d * d / (2.0 * s)) * phi[l] / kSqrt2Pi;
            }
            g[last] = 0.0;
            out[p] = heat_kernel(big, y) - weakly_singular_integral(u_, g);
            continue;
        }

        // Near the barrier, split off the pieces the product trapezoid cannot
        // resolve and integrate them exactly:
        //   d = z + s*Theta gives a first-passage part (weight z/s^{3/2})
        //   and a bounded part (weight Theta/s^{1/2}); both are regularized
        //   by subtracting their s -> 0 expansions, which have closed forms.
        const double anchor = std::exp(z * np) * phi[last];
        // One-sided second-order slope of the smooth factor P(s) at s = 0,
        // so the remainder vanishes quadratically in the first cell.
        const auto p_at = [&](std::size_t l) {
            const double s = big - u_[l];
            const double th = kern.theta(last, l);
            return std::exp(-z * th - 0.5 * s * th * th) * phi[l];
        };
        const double p1 = (s2 * s2 * (p_at(last - 1) - anchor) -
                           s1 * s1 * (p_at(last - 2) - anchor)) /
                          (s1 * s2 * (s2 - s1));
        for (std::size_t l = 0; l < last; ++l) {
            const double s = big - u_[l];
            g[l] = z * std::exp(-z * z / (2.0 * s)) * (p_at(l) - anchor - p1 * s) /
                   (kSqrt2Pi * s);
        }
        g[last] = 0.0;
        double layer = weakly_singular_integral(u_, g);
        const double ncz = norm_cdf(-z / sq_big);
        const double e0 = 2.0 * sq_big * std::exp(-z * z / (2.0 * big)) -
                          2.0 * z * kSqrt2Pi * ncz;
        layer += 2.0 * anchor * ncz + p1 * z * e0 / kSqrt2Pi;

        const double b0 = -np * anchor / kSqrt2Pi;  // s=0 limit of the bounded part
        for (std::size_t l = 0; l < last; ++l) {
            const double s = big - u_[l];
            const double th = kern.theta(last, l);
            const double xi_fac = std::exp(-0.5 * s * th * th);
            g[l] = std::exp(-z * z / (2.0 * s)) *
                       (th * std::exp(-z * th) * xi_fac * phi[l] / kSqrt2Pi - b0);
        }
        g[last] = 0.0;
        layer += weakly_singular_integral(u_, g);
        layer += b0 * (2.0 * sq_big * std::exp(-z * z / (2.0 * big)) -
                       2.0 * z * kSqrt2Pi * norm_cdf(-z / sq_big));

        out[p] = heat_kernel(big, y) - layer;
    }
    return out;
}

double MhpSolver::survival_forward() {
    const std::vector<double>& phi = green_density().phi;
    const std::size_t last = u_.size() - 1;
    const double big = u_.back();
    const double n_big = n_.back();
    // Near s = 0 the integrand approaches phi_n * exp(-n'(0)^2 s / 2), which
    // decays on the scale 2/n'^2 -- under-resolved when the terminal drift
    // slope is steep. Subtract that profile and integrate it in closed form:
    //   int_0^U exp(-a s) s^{-1/2} ds = sqrt(2 pi / a) * erf-type tail.
    const double np = (n_[last] - n_[last - 1]) / (big - u_[last - 1]);
    const double a_np = std::abs(np);
    std::vector<double> g(last + 1);
    for (std::size_t l = 0; l < last; ++l) {
        const double s = big - u_[l];
        const double d = n_big - n_[l];
        g[l] = (std::exp(-d * d / (2.0 * s)) * phi[l] -
                std::exp(-0.5 * np * np * s) * phi[last]) /
               kSqrt2Pi;
    }
    g[last] = 0.0;
    const double sq_big = std::sqrt(big);
    const double closed =
        a_np > 1e-8
            ? phi[last] * (2.0 * norm_cdf(a_np * sq_big) - 1.0) / a_np
            : phi[last] * 2.0 * sq_big / kSqrt2Pi;
    return norm_cdf(-(xi_ - n_big) / sq_big) -
           (weakly_singular_integral(u_, g) + closed);
}

const std::vector<double>& MhpSolver::psi_no_touch() {
    if (!have_psi_nt_) {
        BoundaryKernel kern(w_, o_);
        std::vector<double> f(w_.size(), 1.0);
        psi_nt_ = solve_volterra_with(kern, f, w_);
        have_psi_nt_ = true;
    }
    return psi_nt_;
}

// Single layer of the time-reversed problem, evaluated at the inception point
// y0 = N(Upsilon): the boundary offset there is -xi + O(w').
double MhpSolver::backward_barrier_payoff(std::span<const double> psi) {
    const std::size_t last = w_.size() - 1;
    const double big = w_.back();
    std::vector<double> q(last + 1);
    for (std::size_t l = 0; l < last; ++l) {
        const double s = big - w_[l];
        const double d = -xi_ + o_[l];
        q[l] = d * std::exp(-d * d / (2.0 * s)) * psi[l] / (kSqrt2Pi * s);
    }
    q[last] = 0.0;
    return weakly_singular_integral(w_, q);
}

double MhpSolver::survival_backward() {
    return 1.0 - backward_barrier_payoff(psi_no_touch());
}

double MhpSolver::no_touch(double r, double maturity, InnerMode mode) {
    const double survival = mode == InnerMode::Forward ? survival_forward() : survival_backward();
    return std::exp(-r * maturity) * survival;
}

double MhpSolver::barrier_call(double log_strike, double r, double maturity, double s0,
                               InnerMode mode, bool literal_backward_rhs) {
    if (!std::isfinite(log_strike)) throw InvalidParam("log_strike", "must be finite");
    if (log_strike < xi_ && mode == InnerMode::Forward) {
        // Survivors always finish above the barrier, so a strike below it is
        // the at-barrier strike plus a cash rebate of B - K per survivor.
        return barrier_call(xi_, r, maturity, s0, mode, literal_backward_rhs) +
               s0 * (std::exp(xi_) - std::exp(log_strike)) * no_touch(r, maturity, mode);
    }
    const double big = u_.back();
    const double n_big = n_.back();
    const double sq_big = std::sqrt(big);
    const double disc = std::exp(-r * maturity) * s0;
    const double free_value = std::exp(n_big + 0.5 * big) *
                                  norm_cdf((n_big - log_strike + big) / sq_big) -
                              std::exp(log_strike) * norm_cdf((n_big - log_strike) / sq_big);

    if (mode == InnerMode::Forward) {
        const std::vector<double>& phi = green_density().phi;
        const std::size_t last = u_.size() - 1;
        // Exercise-region integral of the single layer: closed form in X
        // leaves a smooth integrand over the clock.
        std::vector<double> h(last + 1);
        for (std::size_t l = 0; l <= last; ++l) {
            const double s = big - u_[l];
            const double bl = xi_ - n_[l] + n_big;  // boundary level in X
            const double delta = log_strike - bl;
            if (s > 0.0) {
                h[l] = std::exp(bl + 0.5 * s) * norm_cdf((s - delta) / std::sqrt(s)) * phi[l];
            } else {
                h[l] = std::abs(delta) <= 1e-14 ? 0.5 * std::exp(bl) * phi[l] : 0.0;
            }
        }
        double corr = 0.0;
        for (std::size_t l = 1; l <= last; ++l)
            corr += 0.5 * (u_[l] - u_[l - 1]) * (h[l] + h[l - 1]);
        return disc * (free_value - corr);
    }

    // Backward: rhs is the free call value along the reversed boundary.
    const std::size_t m = w_.size();
    std::vector<double> f(m);
    f[0] = std::max(std::exp(xi_) - std::exp(log_strike), 0.0);
    const double o0 = o_[0];
    for (std::size_t j = 1; j < m; ++j) {
        const double y = xi_ - o_[j] + o0;  // reversed boundary level
        const double tau = literal_backward_rhs ? big : w_[j];
        const double sq = std::sqrt(tau);
        f[j] = std::exp(y + 0.5 * tau) * norm_cdf((y - log_strike + tau) / sq) -
               std::exp(log_strike) * norm_cdf((y - log_strike) / sq);
    }
    BoundaryKernel kern(w_, o_);
    const std::vector<double> psi = solve_volterra_with(kern, f, w_);
    return disc * (free_value - backward_barrier_payoff(psi));
}

double MhpSolver::barrier_put(double log_strike, double r, double maturity, double s0) {
    if (!(log_strike >= xi_)) throw InvalidParam("log_strike", "requires k >= xi");
    const double big = u_.back();
    const double sq_big = std::sqrt(big);
    const double o0 = o_[0];
    const double disc = std::exp(-r * maturity) * s0;
    const double free_value = std::exp(log_strike) * norm_cdf((log_strike - o0) / sq_big) -
                              std::exp(o0 + 0.5 * big) *
                                  norm_cdf((log_strike - o0 - big) / sq_big);

    const std::size_t m = w_.size();
    std::vector<double> f(m);
    f[0] = std::max(std::exp(log_strike) - std::exp(xi_), 0.0);
    for (std::size_t j = 1; j < m; ++j) {
        const double y = xi_ - o_[j] + o0;
        const double sq = std::sqrt(w_[j]);
        f[j] = std::exp(log_strike) * norm_cdf(-(y - log_strike) / sq) -
               std::exp(y + 0.5 * w_[j]) * norm_cdf(-(y - log_strike + w_[j]) / sq);
    }
    BoundaryKernel kern(w_, o_);
    const std::vector<double> psi = solve_volterra_with(kern, f, w_);
    return disc * (free_value - backward_barrier_payoff(psi));
}

std::vector<double> green_function(const MovingBoundary& b, double xi,
                                   std::span<const double> x, int refine) {
    MhpSolver solver(b, xi, refine);
    return solver.green(x);
}

double no_touch_price(const MovingBoundary& b, double xi, double r, double maturity,
                      InnerMode mode, int refine) {
    MhpSolver solver(b, xi, refine);
    return solver.no_touch(r, maturity, mode);
}

double barrier_call_price(const MovingBoundary& b, double xi, double log_strike, double r,
                          double maturity, double s0, InnerMode mode, int refine) {
    MhpSolver solver(b, xi, refine);
    return solver.barrier_call(log_strike, r, maturity, s0, mode);
}

double constant_drift_phi(double u, double xi, double lambda) {
    if (!(u > 0.0)) throw InvalidParam("u", "needs u > 0");
    return heat_kernel(u, xi - lambda * u) +
           lambda * std::exp(2.0 * xi * lambda) * norm_cdf((xi + lambda * u) / std::sqrt(u));
}

double constant_drift_green(double maturity, double x, double xi, double lambda) {
    if (x <= xi) return 0.0;
    const double y = x - lambda * maturity;
    return heat_kernel(maturity, y) -
           std::exp(2.0 * xi * lambda) * heat_kernel(maturity, y - 2.0 * xi);
}

}  // namespace svb
