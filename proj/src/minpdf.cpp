#include "svbarrier/minpdf.hpp"

#include <cmath>

#include "svbarrier/vanilla_analytic.hpp"

namespace svb {

namespace {
constexpr double kSqrt2Pi = 2.50662827463100050242;
}

MinPdfSolver::MinPdfSolver(const MovingBoundary& drift, int refine) {
    if (drift.nodes.empty() || drift.nodes.front() != 0.0 || drift.n.front() != 0.0)
        throw InvalidParam("drift", "clock must start at 0 with zero drift");
    const MovingBoundary fine = drift.refined(refine);
    u_ = fine.nodes;
    n_ = fine.n;

    // The boundary rhs heat_kernel(u, a - n(u)) has a startup layer around
    // u ~ a^2 carrying most of the first-passage mass. For levels a close to
    // zero the layer sits at scales where a uniform grid is relatively
    // coarse, so overlay a geometric ladder keeping the node spacing bounded
    // relative to u at every scale.
    const double big = u_.back();
    std::vector<double> ladder;
    for (double u = 0.9 * big; u > 1e-10 * big; u *= 0.9) ladder.push_back(u);
    std::vector<double> mu, mn;
    mu.reserve(u_.size() + ladder.size());
    mn.reserve(u_.size() + ladder.size());
    mu.push_back(u_[0]);
    mn.push_back(n_[0]);
    std::size_t j = ladder.size();  // consume smallest-first
    for (std::size_t i = 1; i < u_.size(); ++i) {
        while (j > 0 && ladder[j - 1] < u_[i]) {
            const double g = ladder[--j];
            // Skip ladder nodes nearly coincident with existing ones: the
            // divided-difference kernel needs well-separated abscissae.
            if (g - mu.back() > 0.05 * g && u_[i] - g > 0.05 * g) {
                mu.push_back(g);
                mn.push_back(drift(g));
            }
        }
        mu.push_back(u_[i]);
        mn.push_back(n_[i]);
    }
    u_ = std::move(mu);
    n_ = std::move(mn);
}

void MinPdfSolver::densities_for(double a, std::vector<double>& phi, std::vector<double>& psi) {
    if (!(a < 0.0)) throw DomainError("minimum level a must be negative");
    if (have_cache_ && a == cached_a_) {
        phi = phi_;
        psi = psi_;
        return;
    }
    const std::size_t m = u_.size();
    std::vector<double> f(m), g(m);
    f[0] = 0.0;
    g[0] = 0.0;
    for (std::size_t l = 1; l < m; ++l) {
        const double d = a - n_[l];
        f[l] = heat_kernel(u_[l], d);
        g[l] = -(d / u_[l]) * f[l];  // d/da of the boundary rhs
    }
    BoundaryKernel kern(u_, n_);
    phi_ = solve_volterra_with(kern, f, u_);
    psi_ = solve_volterra_with(kern, g, u_);
    cached_a_ = a;
    have_cache_ = true;
    phi = phi_;
    psi = psi_;
}

double MinPdfSolver::joint_pdf(double a, double b) {
    const double v[1] = {b};
    return joint_pdf_row(a, v)[0];
}

std::vector<double> MinPdfSolver::joint_pdf_row(double a, std::span<const double> b) {
    std::vector<double> phi, psi;
    densities_for(a, phi, psi);
    const std::size_t last = u_.size() - 1;
    const double big = u_.back();
    const double n_big = n_.back();

    // pi = int [(d^2/s - 1) phi + d psi] e^{-d^2/2s} / sqrt(2 pi s^3),
    // d = Z + Theta*s with Z = b - a. Expanding d^2 and splitting off the
    // s -> 0 limits leaves a resolvable remainder under the product
    // trapezoid; the split-off moments int e^{-Z^2/2s} s^{-(2k+1)/2} ds have
    // closed forms whose 1/Z singularities cancel identically.
    BoundaryKernel kern(u_, n_);
    const double np = (n_[last] - n_[last - 1]) / (u_[last] - u_[last - 1]);
    const double th0 = -np;
    const double sq_big = std::sqrt(big);
    const double s1 = big - u_[last - 1];
    const double s2 = big - u_[last - 2];
    // Direct quadrature resolves the layer once the Gaussian peak sits many
    // cells inside the grid; the regularized split below would also lose all
    // precision there because its anchors grow like exp(Z * n').
    const double z_split = 16.0 * std::sqrt(s1);

    std::vector<double> g(last + 1), out(b.size());
    for (std::size_t p = 0; p < b.size(); ++p) {
        const double bp = b[p];
        if (bp < a) throw DomainError("terminal value b must be >= a");
        const double z = bp - a;

        if (z > z_split) {
            for (std::size_t l = 0; l < last; ++l) {
                const double s = big - u_[l];
                const double th = kern.theta(last, l);
                const double d = z + s * th;
                g[l] = ((d * d / s - 1.0) * phi[l] + d * psi[l]) *
                       std::exp(-d * d / (2.0 * s)) / s;
            }
            g[last] = 0.0;
            out[p] = weakly_singular_integral(u_, g) / kSqrt2Pi;
            continue;
        }
        const double p0 = std::exp(-z * th0) * phi[last];
        const double q0 = std::exp(-z * th0) * psi[last];
        const double s0c = th0 * th0 * p0 + th0 * q0;
        const double r0 = (2.0 * z * th0 - 1.0) * p0 + z * q0;

        // One-sided second-order slope of the smooth factor P(s) at s = 0.
        const auto p_at = [&](std::size_t l) {
            const double s = big - u_[l];
            const double th = kern.theta(last, l);
            return std::exp(-z * th - 0.5 * s * th * th) * phi[l];
        };
        const double p1 = (s2 * s2 * (p_at(last - 1) - p0) - s1 * s1 * (p_at(last - 2) - p0)) /
                          (s1 * s2 * (s2 - s1));

        for (std::size_t l = 0; l < last; ++l) {
            const double s = big - u_[l];
            const double th = kern.theta(last, l);
            const double x = std::exp(-z * th - 0.5 * s * th * th);
            const double pl = x * phi[l];
            const double ql = x * psi[l];
            const double rl = (2.0 * z * th - 1.0) * pl + z * ql;
            const double sl = th * th * pl + th * ql;
            g[l] = std::exp(-z * z / (2.0 * s)) *
                   (z * z * (pl - p0 - p1 * s) / (s * s) + (rl - r0) / s + (sl - s0c));
        }
        g[last] = 0.0;

        const double ncz = norm_cdf(-z / sq_big);
        const double gauss_tail = std::exp(-z * z / (2.0 * big));
        const double e0 = 2.0 * sq_big * gauss_tail - 2.0 * z * kSqrt2Pi * ncz;
        // p0*(Z^2 E2 + (2 Z th0 - 1) E1) collapses to the finite combination
        // below; the q0 and p1 pieces each carry one factor of Z against E1.
        const double closed = p0 * (2.0 * gauss_tail / sq_big + 4.0 * kSqrt2Pi * th0 * ncz) +
                              2.0 * kSqrt2Pi * ncz * (q0 + p1 * z) + s0c * e0;
        out[p] = (weakly_singular_integral(u_, g) + closed) / kSqrt2Pi;
    }
    return out;
}

double joint_pdf_bm(double maturity, double a, double b) {
    return joint_pdf_drifted(maturity, a, b, 0.0);
}

double joint_pdf_drifted(double maturity, double a, double b, double lambda) {
    if (a >= 0.0) throw DomainError("minimum level a must be negative");
    if (b < a) throw DomainError("terminal value b must be >= a");
    const double d = b - 2.0 * a;
    return 2.0 * d * std::exp(lambda * b - 0.5 * lambda * lambda * maturity) *
           std::exp(-d * d / (2.0 * maturity)) /
           (kSqrt2Pi * maturity * std::sqrt(maturity));
}

double joint_pdf_time_dependent(const MovingBoundary& drift, double a, double b, int refine) {
    if (a >= 0.0) throw DomainError("minimum level a must be negative");
    if (b < a) throw DomainError("terminal value b must be >= a");
    MinPdfSolver solver(drift, refine);
    return solver.joint_pdf(a, b);
}

double min_survival_drifted(double maturity, double a, double lambda) {
    if (a >= 0.0) return 0.0;
    const double sq = std::sqrt(maturity);
    return norm_cdf((-a + lambda * maturity) / sq) -
           std::exp(2.0 * a * lambda) * norm_cdf((a + lambda * maturity) / sq);
}

}  // namespace svb
