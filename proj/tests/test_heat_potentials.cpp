#include <doctest.h>

#include <cmath>
#include <vector>

#include "svbarrier/heat_potentials.hpp"
#include "svbarrier/vanilla_analytic.hpp"
#include "svbarrier/variance_paths.hpp"
#include "svbarrier/willard.hpp"

using namespace svb;

namespace {

HestonParams paper_params() { return {0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0}; }

MovingBoundary linear_boundary(double lambda, double big, int n) {
    MovingBoundary b;
    b.nodes.resize(n + 1);
    b.n.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        b.nodes[k] = big * k / n;
        b.n[k] = lambda * b.nodes[k];
    }
    return b;
}

MovingBoundary path_boundary(const HestonParams& p, std::uint64_t seed, long index,
                             int k_steps = 52) {
    PathRng rng(seed, static_cast<std::uint64_t>(index), 0);
    const VariancePath path = simulate_variance_path(p, 1.0, k_steps, rng);
    const ConditionalCoefficients c = conditional_coeffs(path, p);
    return MovingBoundary{c.upsilon, c.m};
}

}  // namespace

TEST_CASE("heat kernel basics") {
    CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
    CHECK(heat_kernel(0.7, 1.3) == doctest::Approx(heat_kernel(0.7, -1.3)).epsilon(1e-15));
    CHECK_THROWS_AS(heat_kernel(0.0, 1.0), InvalidParam);

    // Unit mass by trapezoid over +-10 standard deviations.
    const double u = 0.37;
    const int n = 20000;
    const double lo = -10.0 * std::sqrt(u), hi = 10.0 * std::sqrt(u);
    double mass = 0.0;
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        mass += w * heat_kernel(u, lo + i * h);
    }
    CHECK(mass * h == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("volterra solver degenerate kernels") {
    std::vector<double> grid(101), f(101);
    for (int k = 0; k <= 100; ++k) {
        grid[k] = k / 100.0;
        f[k] = std::sin(3.0 * grid[k]) + 2.0;
    }
    const auto zero_kernel = [](std::size_t, std::size_t) { return 0.0; };
    const std::vector<double> phi = solve_volterra_with(zero_kernel, f, grid);
    for (int k = 0; k <= 100; ++k) CHECK(phi[k] == doctest::Approx(f[k]).epsilon(1e-14));

    std::vector<double> ones(101, 1.0);
    const std::vector<double> one_sol = solve_volterra_with(zero_kernel, ones, grid);
    for (double v : one_sol) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("volterra solution matches the constant-drift closed form") {
    const double xi = -0.5, lambda = 0.5;
    const MovingBoundary b = linear_boundary(lambda, 1.0, 1000);
    MhpSolver solver(b, xi, 1);
    const VolterraSolution& sol = solver.green_density();
    double max_err = 0.0;
    for (std::size_t k = 1; k < sol.grid.size(); ++k)
        max_err = std::max(max_err,
                           std::abs(sol.phi[k] - constant_drift_phi(sol.grid[k], xi, lambda)));
    CHECK(max_err < 1e-4);
}

TEST_CASE("volterra convergence is at least first order") {
    const double xi = -0.5, lambda = 0.5;
    const auto err_at = [&](int n) {
        MhpSolver solver(linear_boundary(lambda, 1.0, n), xi, 1);
        const VolterraSolution& sol = solver.green_density();
        double e = 0.0;
        for (std::size_t k = 1; k < sol.grid.size(); ++k)
            e = std::max(e, std::abs(sol.phi[k] - constant_drift_phi(sol.grid[k], xi, lambda)));
        return e;
    };
    const double e1 = err_at(125), e2 = err_at(250), e3 = err_at(500);
    CHECK(e2 < e1);
    CHECK(e3 < e2);
    const double order = std::log2(e1 / e3) / 2.0;
    CHECK(order >= 1.0);
}

TEST_CASE("green boundary rhs") {
    SUBCASE("flat boundary value") {
        const MovingBoundary b = linear_boundary(0.0, 1.0, 10);
        const std::vector<double> f = boundary_rhs_green(b, -0.5);
        CHECK(f[0] == 0.0);
        CHECK(f.back() == doctest::Approx(0.3520653268).epsilon(1e-9));  // H(1, -0.5)
    }
    SUBCASE("constant drift reproduces the moving-boundary rhs") {
        const double lambda = 0.5, xi = -0.5;
        const MovingBoundary b = linear_boundary(lambda, 1.0, 64);
        const std::vector<double> f = boundary_rhs_green(b, xi);
        for (std::size_t k = 1; k < f.size(); ++k)
            CHECK(f[k] ==
                  doctest::Approx(heat_kernel(b.nodes[k], xi - lambda * b.nodes[k]))
                      .epsilon(1e-13));
    }
}

TEST_CASE("constant drift closed forms") {
    const double xi = -0.5, lambda = 0.5;
    CHECK(constant_drift_phi(1.0, xi, lambda) == doctest::Approx(0.393603).epsilon(1e-5));
    CHECK(constant_drift_phi(1e-8, xi, lambda) < 1e-6);
    CHECK(constant_drift_phi(1e6, xi, lambda) ==
          doctest::Approx(lambda * std::exp(2.0 * xi * lambda)).epsilon(1e-4));

    CHECK(constant_drift_green(1.0, xi, xi, lambda) == 0.0);
    // Zero drift reduces to the plain image difference.
    const double x = 0.3;
    CHECK(constant_drift_green(1.0, x, xi, 0.0) ==
          doctest::Approx(heat_kernel(1.0, x) - heat_kernel(1.0, x - 2.0 * xi)).epsilon(1e-14));

    // Survival mass of the image solution.
    double mass = 0.0;
    const int n = 40000;
    const double hi = xi + 12.0;
    const double h = (hi - xi) / n;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        mass += w * constant_drift_green(1.0, xi + i * h, xi, lambda);
    }
    CHECK(mass * h == doctest::Approx(0.538080).epsilon(2e-5));
}

TEST_CASE("green function against the image formula") {
    const double xi = -0.5, lambda = 0.5;
    MhpSolver solver(linear_boundary(lambda, 1.0, 400), xi, 1);
    std::vector<double> x;
    for (double v = xi; v <= xi + 4.0; v += 0.01) x.push_back(v);
    const std::vector<double> g = solver.green(x);
    double max_err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        max_err = std::max(max_err, std::abs(g[i] - constant_drift_green(1.0, x[i], xi, lambda)));
    CHECK(max_err < 1e-4);
}

TEST_CASE("green function vanishes on the boundary for rough paths") {
    const HestonParams p = paper_params();
    for (long i = 0; i < 10; ++i) {
        MhpSolver solver(path_boundary(p, 77, i), -0.5, 4);
        const std::vector<double> at_barrier = solver.green(std::vector<double>{-0.5});
        CHECK(std::abs(at_barrier[0]) < 1e-6);
    }
}

TEST_CASE("no-touch price") {
    const double xi = -0.5, lambda = 0.5;
    const MovingBoundary b = linear_boundary(lambda, 1.0, 400);

    SUBCASE("constant-drift survival oracle, both modes") {
        MhpSolver fwd(b, xi, 1);
        CHECK(fwd.no_touch(0.0, 1.0, InnerMode::Forward) ==
              doctest::Approx(0.538080).epsilon(2e-4));
        MhpSolver bwd(b, xi, 1);
        CHECK(bwd.no_touch(0.0, 1.0, InnerMode::Backward) ==
              doctest::Approx(0.538080).epsilon(2e-4));
    }

    SUBCASE("remote barrier makes no-touch certain") {
        MhpSolver solver(linear_boundary(lambda, 1.0, 200), -50.0, 1);
        CHECK(solver.no_touch(0.03, 1.0, InnerMode::Forward) ==
              doctest::Approx(std::exp(-0.03)).epsilon(1e-10));
        CHECK(solver.no_touch(0.03, 1.0, InnerMode::Backward) ==
              doctest::Approx(std::exp(-0.03)).epsilon(1e-10));
    }

    SUBCASE("forward/backward duality on rough paths") {
        const HestonParams p = paper_params();
        for (long i = 0; i < 20; ++i) {
            MhpSolver solver(path_boundary(p, 101, i), -0.5, 16);
            const double f = solver.no_touch(p.r, 1.0, InnerMode::Forward);
            const double g = solver.no_touch(p.r, 1.0, InnerMode::Backward);
            CHECK(std::abs(f - g) < 1e-3);
            CHECK(f >= 0.0);
            CHECK(f <= std::exp(-p.r) + 1e-12);
        }
    }
}

TEST_CASE("mass-survival consistency") {
    const HestonParams p = paper_params();
    MhpSolver solver(path_boundary(p, 55, 3), -0.5, 4);
    const double big = solver.big_upsilon();
    const double xi = -0.5;
    const double hi = xi + 12.0 * std::sqrt(big) + 1.0;
    const int n = 4000;
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = xi + (hi - xi) * i / n;
    const std::vector<double> g = solver.green(x);
    double mass = 0.0;
    for (int i = 1; i <= n; ++i) mass += 0.5 * (g[i] + g[i - 1]) * (x[i] - x[i - 1]);
    const double survival = solver.no_touch(0.0, 1.0, InnerMode::Forward);
    CHECK(std::abs(mass - survival) < 2e-3);
    CHECK(mass <= 1.0 + 1e-9);
}

TEST_CASE("barrier call price") {
    const HestonParams p = paper_params();

    SUBCASE("remote barrier reduces to the conditional vanilla") {
        for (long i = 0; i < 5; ++i) {
            PathRng rng(13, static_cast<std::uint64_t>(i), 0);
            const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
            const ConditionalCoefficients c = conditional_coeffs(path, p);
            const auto [i_T, j_T] = terminal_functionals(path, p);
            MhpSolver solver(MovingBoundary{c.upsilon, c.m}, -50.0, 2);
            const double vanilla = conditional_call(i_T, j_T, p, 1.0, 1.0);
            CHECK(std::abs(solver.barrier_call(0.0, p.r, 1.0, p.s0, InnerMode::Forward) -
                           vanilla) < 1e-4);
            CHECK(std::abs(solver.barrier_call(0.0, p.r, 1.0, p.s0, InnerMode::Backward) -
                           vanilla) < 1e-4);
        }
    }

    SUBCASE("constant-drift oracle by integrating the image density") {
        const double xi = -0.5, lambda = 0.5, k = 0.0;
        MhpSolver solver(linear_boundary(lambda, 1.0, 800), xi, 1);
        // e^{-rT} s0 int (e^x - e^k)+ G(x) dx with r folded to 0 here.
        double oracle = 0.0;
        const int n = 60000;
        const double hi = k + 14.0;
        const double h = (hi - k) / n;
        for (int i = 0; i <= n; ++i) {
            const double x = k + i * h;
            const double w = (i == 0 || i == n) ? 0.5 : 1.0;
            oracle += w * (std::exp(x) - std::exp(k)) * constant_drift_green(1.0, x, xi, lambda);
        }
        oracle *= h;
        CHECK(solver.barrier_call(k, 0.0, 1.0, 1.0, InnerMode::Forward) ==
              doctest::Approx(oracle).epsilon(5e-4));
        CHECK(solver.barrier_call(k, 0.0, 1.0, 1.0, InnerMode::Backward) ==
              doctest::Approx(oracle).epsilon(5e-4));
    }

    SUBCASE("ordering and duality on rough paths") {
        for (long i = 0; i < 20; ++i) {
            PathRng rng(14, static_cast<std::uint64_t>(i), 0);
            const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
            const ConditionalCoefficients c = conditional_coeffs(path, p);
            const auto [i_T, j_T] = terminal_functionals(path, p);
            MhpSolver solver(MovingBoundary{c.upsilon, c.m}, -0.5, 4);
            const double fwd = solver.barrier_call(0.0, p.r, 1.0, p.s0, InnerMode::Forward);
            const double bwd = solver.barrier_call(0.0, p.r, 1.0, p.s0, InnerMode::Backward);
            CHECK(std::abs(fwd - bwd) < 1e-3);
            CHECK(bwd >= -1e-10);
            CHECK(bwd <= conditional_call(i_T, j_T, p, 1.0, 1.0) + 1e-6);
        }
    }

    SUBCASE("strike at the barrier stays positive and below the vanilla") {
        PathRng rng(15, 0, 0);
        const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
        const ConditionalCoefficients c = conditional_coeffs(path, p);
        const auto [i_T, j_T] = terminal_functionals(path, p);
        MhpSolver solver(MovingBoundary{c.upsilon, c.m}, -0.5, 4);
        const double price =
            solver.barrier_call(-0.5, p.r, 1.0, p.s0, InnerMode::Backward);
        CHECK(price > 0.0);
        const double vanilla = conditional_call(i_T, j_T, p, std::exp(-0.5), 1.0);
        CHECK(price <= vanilla + 1e-6);
        // A strike below the barrier adds a cash rebate of B - K per survivor.
        const double below_fwd = solver.barrier_call(-0.6, p.r, 1.0, p.s0, InnerMode::Forward);
        const double below_bwd = solver.barrier_call(-0.6, p.r, 1.0, p.s0, InnerMode::Backward);
        const double rebate = p.s0 * (std::exp(-0.5) - std::exp(-0.6)) *
                              solver.no_touch(p.r, 1.0, InnerMode::Forward);
        CHECK(std::abs(below_fwd - (price + rebate)) < 1e-3);
        CHECK(std::abs(below_bwd - (price + rebate)) < 1e-3);
    }
}

TEST_CASE("barrier put price against the image-density oracle") {
    const double xi = -0.5, lambda = 0.5, k = -0.1;
    MhpSolver solver(linear_boundary(lambda, 1.0, 800), xi, 1);
    double oracle = 0.0;
    const int n = 20000;
    const double h = (k - xi) / n;
    for (int i = 0; i <= n; ++i) {
        const double x = xi + i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        oracle += w * (std::exp(k) - std::exp(x)) * constant_drift_green(1.0, x, xi, lambda);
    }
    oracle *= h;
    CHECK(solver.barrier_put(k, 0.0, 1.0, 1.0) == doctest::Approx(oracle).epsilon(5e-4));
}

TEST_CASE("moving boundary helpers") {
    MovingBoundary b = linear_boundary(0.5, 1.0, 4);
    CHECK(b(0.5) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(b(2.0) == doctest::Approx(0.5).epsilon(1e-14));  // clamped
    const MovingBoundary fine = b.refined(3);
    CHECK(fine.nodes.size() == 13);
    CHECK(fine.nodes.back() == b.nodes.back());
    CHECK(fine.n[1] == doctest::Approx(0.5 / 12.0).epsilon(1e-14));
    CHECK_THROWS_AS(b.refined(0), InvalidParam);
}
