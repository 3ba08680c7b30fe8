#include "svbarrier/fdm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace svb {

namespace {

// Rows of one Crank-Nicolson half-operator. Coefficients are spatially
// constant within a substep, so interior rows share one stencil. The first
// row is an identity row (Dirichlet); the last row acts on the final four
// nodes, which covers both a one-sided PDE row and a Dirichlet row.
struct CnMatrix {
    double lo = 0.0, di = 1.0, up = 0.0;
    std::array<double, 4> last{0.0, 0.0, 0.0, 1.0};
};

void apply(const CnMatrix& mat, const std::vector<double>& v, std::vector<double>& out) {
    const std::size_t m = v.size() - 1;
    out[0] = v[0];
    for (std::size_t j = 1; j < m; ++j)
        out[j] = mat.lo * v[j - 1] + mat.di * v[j] + mat.up * v[j + 1];
    out[m] = mat.last[0] * v[m - 3] + mat.last[1] * v[m - 2] + mat.last[2] * v[m - 1] +
             mat.last[3] * v[m];
}

// Thomas elimination V_j = e_j - f_j V_{j+1}, with the irregular last row
// collapsed by substituting the three preceding eliminated unknowns.
void solve(const CnMatrix& mat, std::vector<double>& rhs, std::vector<double>& e,
           std::vector<double>& f) {
    const std::size_t m = rhs.size() - 1;
    e[0] = rhs[0];
    f[0] = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
        const double den = mat.di - mat.lo * f[j - 1];
        if (std::abs(den) < 1e-300) throw SolverSingular("tridiagonal pivot vanished");
        e[j] = (rhs[j] - mat.lo * e[j - 1]) / den;
        f[j] = mat.up / den;
    }
    // Fold V_j = e_j - f_j V_{j+1} into the last row for j = m-3, m-2, m-1.
    double coeffs[4] = {mat.last[0], mat.last[1], mat.last[2], mat.last[3]};
    double r = rhs[m];
    for (std::size_t step = 0; step < 3; ++step) {
        const std::size_t j = m - 3 + step;
        r -= coeffs[step] * e[j];
        coeffs[step + 1] -= coeffs[step] * f[j];
    }
    if (std::abs(coeffs[3]) < 1e-300) throw SolverSingular("last-row pivot vanished");
    std::vector<double>& v = rhs;  // reuse storage for the solution
    v[m] = r / coeffs[3];
    for (std::size_t j = m; j-- > 0;) v[j] = e[j] - f[j] * v[j + 1];
}

struct StepOperators {
    CnMatrix lhs, rhs;
};

// a = mu dt / (4 dx), b = nu^2 dt / (4 dx^2). `forward` flips the sign of the
// advection term (Fokker-Planck) and uses a Dirichlet top row instead of the
// one-sided PDE row.
StepOperators build_operators(double a, double b, bool forward) {
    StepOperators op;
    if (forward) a = -a;
    op.lhs.lo = a - b;
    op.lhs.di = 1.0 + 2.0 * b;
    op.lhs.up = -a - b;
    op.rhs.lo = -a + b;
    op.rhs.di = 1.0 - 2.0 * b;
    op.rhs.up = a + b;
    if (forward) {
        op.lhs.last = {0.0, 0.0, 0.0, 1.0};
        op.rhs.last = {0.0, 0.0, 0.0, 0.0};
    } else {
        op.lhs.last = {b, -a - 4.0 * b, 4.0 * a + 5.0 * b, 1.0 - 3.0 * a - 2.0 * b};
        op.rhs.last = {-b, a + 4.0 * b, -4.0 * a - 5.0 * b, 1.0 + 3.0 * a + 2.0 * b};
    }
    return op;
}

double payoff_at(PayoffKind kind, double x, double log_strike) {
    switch (kind) {
        case PayoffKind::NoTouch: return 1.0;
        case PayoffKind::DownOutCall: return std::max(std::exp(x) - std::exp(log_strike), 0.0);
        case PayoffKind::DownOutPut: return std::max(std::exp(log_strike) - std::exp(x), 0.0);
    }
    return 0.0;
}

double auto_x_max(const ConditionalCoefficients& coeffs, double extra) {
    double m_max = 0.0;
    for (double v : coeffs.m) m_max = std::max(m_max, v);
    return std::max({3.0, m_max + 4.0 * std::sqrt(coeffs.big_upsilon) + 0.5, extra});
}

}  // namespace

SpatialGrid make_spatial_grid(double xi, double x_max, int m0) {
    if (!(xi < 0.0)) throw InvalidParam("xi", "log-barrier must be negative");
    if (m0 < 4) throw InvalidParam("m0", "needs at least 4 nodes below the origin");
    if (!(x_max > 0.0)) throw InvalidParam("x_max", "must be positive");
    SpatialGrid g;
    g.xi = xi;
    g.dx = -xi / m0;
    g.origin_index = static_cast<std::size_t>(m0);
    const std::size_t total =
        g.origin_index + static_cast<std::size_t>(std::ceil(x_max / g.dx)) + 1;
    g.x.resize(total);
    for (std::size_t j = 0; j < total; ++j)
        g.x[j] = xi + static_cast<double>(j) * g.dx;
    g.x[g.origin_index] = 0.0;
    return g;
}

double cn_backward_price(const ConditionalCoefficients& coeffs, double dt, double xi,
                         PayoffKind kind, double log_strike, double r, double maturity,
                         double s0, const FdmConfig& cfg) {
    const std::size_t k_steps = coeffs.m.size() - 1;
    const double extra = kind == PayoffKind::NoTouch ? 0.0 : log_strike + 1.5;
    const double x_max = cfg.x_max > 0.0 ? cfg.x_max : auto_x_max(coeffs, extra);
    SpatialGrid grid = make_spatial_grid(xi, x_max, cfg.m0);
    const std::size_t n = grid.x.size();

    std::vector<double> v(n), rhs(n), e(n), f(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = payoff_at(kind, grid.x[j], log_strike);
    v[0] = 0.0;

    const double sub_dt = dt / cfg.time_refine;
    int startup = 2;  // Rannacher: damp the payoff kink before trapezoidal stepping
    for (std::size_t k = k_steps; k >= 1; --k) {
        const double mu = (coeffs.m[k] - coeffs.m[k - 1]) / dt;
        const double nu2 = (coeffs.upsilon[k] - coeffs.upsilon[k - 1]) / dt;
        const double a = mu * sub_dt / (4.0 * grid.dx);
        const double b = nu2 * sub_dt / (4.0 * grid.dx * grid.dx);
        const StepOperators op = build_operators(a, b, /*forward=*/false);
        for (int s = 0; s < cfg.time_refine; ++s) {
            if (startup > 0) {
                // Two implicit-Euler half-substeps share the CN left side.
                for (int h = 0; h < 2; ++h) {
                    rhs = v;
                    rhs[0] = 0.0;
                    solve(op.lhs, rhs, e, f);
                    v.swap(rhs);
                }
                --startup;
                continue;
            }
            apply(op.rhs, v, rhs);
            rhs[0] = 0.0;
            solve(op.lhs, rhs, e, f);
            v.swap(rhs);
        }
    }
    const double scale = kind == PayoffKind::NoTouch ? 1.0 : s0;
    return std::exp(-r * maturity) * scale * v[grid.origin_index];
}

std::vector<double> cn_forward_green(const ConditionalCoefficients& coeffs, double dt, double xi,
                                     const FdmConfig& cfg, SpatialGrid& grid_out) {
    const std::size_t k_steps = coeffs.m.size() - 1;
    const double x_max = cfg.x_max > 0.0 ? cfg.x_max : auto_x_max(coeffs, 0.0);
    grid_out = make_spatial_grid(xi, x_max, cfg.m0);
    const std::size_t n = grid_out.x.size();

    std::vector<double> g(n, 0.0), rhs(n), e(n), f(n);
    g[grid_out.origin_index] = 1.0 / grid_out.dx;

    const double sub_dt = dt / cfg.time_refine;
    int startup = 2;  // Rannacher: damp the delta initial data before trapezoidal stepping
    for (std::size_t k = 1; k <= k_steps; ++k) {
        const double mu = (coeffs.m[k] - coeffs.m[k - 1]) / dt;
        const double nu2 = (coeffs.upsilon[k] - coeffs.upsilon[k - 1]) / dt;
        const double a = mu * sub_dt / (4.0 * grid_out.dx);
        const double b = nu2 * sub_dt / (4.0 * grid_out.dx * grid_out.dx);
        const StepOperators op = build_operators(a, b, /*forward=*/true);
        for (int s = 0; s < cfg.time_refine; ++s) {
            if (startup > 0) {
                for (int h = 0; h < 2; ++h) {
                    rhs = g;
                    rhs[0] = 0.0;
                    rhs[n - 1] = 0.0;
                    solve(op.lhs, rhs, e, f);
                    g.swap(rhs);
                }
                --startup;
                continue;
            }
            apply(op.rhs, g, rhs);
            rhs[0] = 0.0;
            rhs[n - 1] = 0.0;
            solve(op.lhs, rhs, e, f);
            g.swap(rhs);
        }
    }
    return g;
}

double fdm_no_touch_from_green(const SpatialGrid& grid, const std::vector<double>& green,
                               double r, double maturity) {
    double mass = 0.0;
    for (std::size_t j = 1; j < green.size(); ++j)
        mass += 0.5 * (green[j] + green[j - 1]);
    return std::exp(-r * maturity) * grid.dx * mass;
}

}  // namespace svb
