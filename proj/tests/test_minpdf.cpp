#include <doctest.h>

#include <cmath>
#include <vector>

#include "svbarrier/minpdf.hpp"
#include "svbarrier/variance_paths.hpp"

using namespace svb;

namespace {

MovingBoundary linear_drift(double lambda, double maturity, int n) {
    std::vector<double> u(n + 1), m(n + 1);
    for (int i = 0; i <= n; ++i) {
        u[i] = maturity * i / n;
        m[i] = lambda * u[i];
    }
    return MovingBoundary{u, m};
}

MovingBoundary heston_drift(std::uint64_t seed, long index) {
    const HestonParams p{0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0};
    PathRng rng(seed, static_cast<std::uint64_t>(index), 0);
    const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
    const ConditionalCoefficients c = conditional_coeffs(path, p);
    return MovingBoundary{c.upsilon, c.m};
}

}  // namespace

TEST_CASE("closed-form joint density of minimum and endpoint") {
    // Frozen reference at (T, a, b) = (1, -1, 0).
    CHECK(joint_pdf_bm(1.0, -1.0, 0.0) == doctest::Approx(0.2159638661).epsilon(1e-8));
    // Drift enters only through an exponential tilt of the driftless value.
    const double lam = 0.5, a = -0.8, b = 0.3;
    const double tilt = std::exp(lam * b - 0.5 * lam * lam * 1.0);
    CHECK(joint_pdf_drifted(1.0, a, b, lam) ==
          doctest::Approx(tilt * joint_pdf_bm(1.0, a, b)).epsilon(1e-12));
    CHECK(joint_pdf_drifted(1.0, a, b, 0.0) ==
          doctest::Approx(joint_pdf_bm(1.0, a, b)).epsilon(1e-12));
}

TEST_CASE("domain restrictions") {
    CHECK_THROWS_AS(joint_pdf_drifted(1.0, 0.1, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(joint_pdf_drifted(1.0, -0.5, -0.6, 0.0), DomainError);
    MinPdfSolver solver(linear_drift(0.0, 1.0, 100));
    CHECK_THROWS_AS(solver.joint_pdf(0.1, 0.5), DomainError);
    CHECK_THROWS_AS(solver.joint_pdf(-0.5, -0.6), DomainError);
}

TEST_CASE("closed-form marginal over the minimum recovers the endpoint density") {
    // Integrating pi over a in (-inf, min(b,0)) gives the free gaussian
    // density of the endpoint.
    const double lam = 0.5, t = 1.0;
    for (double b : {-0.4, 0.0, 0.7}) {
        const double hi = std::min(b, 0.0);
        double acc = 0.0;
        const int n = 20000;
        const double lo = hi - 10.0;
        const double h = (hi - lo) / n;
        for (int i = 0; i < n; ++i) {  // open at a = hi where pi -> 0
            const double a = lo + (i + 0.5) * h;
            acc += joint_pdf_drifted(t, a, b, lam);
        }
        acc *= h;
        const double gauss = std::exp(-0.5 * (b - lam * t) * (b - lam * t) / t) /
                             std::sqrt(2.0 * M_PI * t);
        CHECK(std::abs(acc - gauss) < 1e-6);
    }
}

TEST_CASE("solver matches the constant-drift closed form") {
    MinPdfSolver solver(linear_drift(0.5, 1.0, 1000), 1);
    for (double a : {-1.2, -0.7, -0.3}) {
        for (double b : {a + 0.1, 0.0, 0.6}) {
            if (b < a) continue;
            const double exact = joint_pdf_drifted(1.0, a, b, 0.5);
            CHECK(std::abs(solver.joint_pdf(a, b) - exact) < 1e-4);
        }
    }
}

TEST_CASE("solver with zero drift reduces to the reflection result") {
    MinPdfSolver solver(linear_drift(0.0, 1.0, 1000), 1);
    CHECK(std::abs(solver.joint_pdf(-1.0, 0.0) - 0.2159638661) < 1e-4);
    CHECK(std::abs(solver.joint_pdf(-0.5, 0.3) - joint_pdf_bm(1.0, -0.5, 0.3)) < 1e-4);
}

TEST_CASE("row evaluation agrees with pointwise evaluation") {
    MinPdfSolver solver(linear_drift(0.5, 1.0, 400), 1);
    const std::vector<double> b{-0.4, -0.1, 0.0, 0.5, 1.2};
    const std::vector<double> row = solver.joint_pdf_row(-0.6, b);
    REQUIRE(row.size() == b.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(row[i] == doctest::Approx(solver.joint_pdf(-0.6, b[i])).epsilon(1e-12));
}

TEST_CASE("solver partial marginal over the minimum on a stochastic clock") {
    // Integrating pi over minimum levels below a cutoff a_c gives the free
    // gaussian minus the density absorbed at a barrier placed at a_c:
    //   int_{-inf}^{a_c} pi(a, b) da = free(b) - green_{a_c}(b).
    // This avoids the a -> 0 corner where no fixed grid resolves the rhs.
    const MovingBoundary drift = heston_drift(13, 2);
    MinPdfSolver solver(drift, 16);
    const double big = solver.big_upsilon();
    const double n_end = drift(big);
    const double a_c = -0.25;
    MhpSolver absorbed(drift, a_c, 16);
    for (double b : {-0.1, 0.0, 0.4}) {
        double acc = 0.0;
        const int n = 400;
        const double lo = a_c - 6.0 * std::sqrt(big);
        const double h = (a_c - lo) / n;
        for (int i = 0; i < n; ++i) acc += solver.joint_pdf(lo + (i + 0.5) * h, b);
        acc *= h;
        const double free_density = heat_kernel(big, b - n_end);
        const double expected = free_density - absorbed.green(std::vector<double>{b})[0];
        CHECK(std::abs(acc - expected) < 1e-3 + 1e-2 * expected);
    }
}

TEST_CASE("density derivative consistency in the barrier level") {
    // pi is dF_a(b)/da; check against a centered difference of the absorbed
    // density produced by the potential solver.
    const MovingBoundary drift = heston_drift(29, 0);
    const double a = -0.5, b = 0.2, eps = 1e-4;
    const double pi = joint_pdf_time_dependent(drift, a, b);
    const auto absorbed = [&](double level) {
        MhpSolver s(drift, level, 4);
        const std::vector<double> pts{b};
        return s.green(pts)[0];
    };
    // Lowering the barrier raises the absorbed density; pi is its negative
    // sensitivity to the level.
    const double fd = -(absorbed(a + eps) - absorbed(a - eps)) / (2.0 * eps);
    CHECK(std::abs(pi - fd) < 1e-3);
}

TEST_CASE("nonnegativity across the domain") {
    MinPdfSolver solver(heston_drift(41, 5), 16);
    const double big = solver.big_upsilon();
    for (double a = -2.5 * std::sqrt(big); a < -0.02; a += 0.1)
        for (double b = a + 0.02; b < 3.0 * std::sqrt(big); b += 0.1)
            CHECK(solver.joint_pdf(a, b) >= -1e-6);
}

TEST_CASE("integral over the endpoint matches the survival probability") {
    const double lam = 0.3, a = -0.9, t = 1.0;
    MinPdfSolver solver(linear_drift(lam, t, 600), 1);
    // P(min > a) = int_a^inf da' int pi(a', b) db; equivalently integrate the
    // solver density over b at fixed a and compare with -dS/da.
    double acc = 0.0;
    const int n = 600;
    const double lo = a + 1e-3, hi = a + 8.0;
    const double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) acc += solver.joint_pdf(a, lo + (i + 0.5) * h);
    acc *= h;
    const double eps = 1e-4;
    const double fd = -(min_survival_drifted(t, a + eps, lam) -
                        min_survival_drifted(t, a - eps, lam)) /
                      (2.0 * eps);
    CHECK(std::abs(acc - fd) < 1e-3);
}
