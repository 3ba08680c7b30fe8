#include <doctest.h>

#include <cmath>

#include "svbarrier/parallel.hpp"
#include "svbarrier/vanilla_analytic.hpp"
#include "svbarrier/willard.hpp"

using namespace svb;

namespace {
HestonParams paper_params() { return {0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0}; }
}  // namespace

TEST_CASE("conditional price reductions") {
    const HestonParams p = paper_params();

    SUBCASE("rho = 0 with a flat path is plain black-scholes") {
        HestonParams q = p;
        q.rho = 0.0;
        const double i_T = 0.04;  // sigma = 0.2 over T = 1
        CHECK(conditional_call(i_T, 0.7, q, 1.0, 1.0) ==
              doctest::Approx(bs_call(1.0, 1.0, 1.0, q.r, 0.2)).epsilon(1e-12));
    }

    SUBCASE("zero integrated variance is the deterministic forward") {
        CHECK(conditional_call(0.0, 0.0, p, 1.0, 1.0) ==
              doctest::Approx(std::max(1.0 - std::exp(-0.03), 0.0)).epsilon(1e-12));
    }

    SUBCASE("negative integrated variance is rejected") {
        CHECK_THROWS_AS(conditional_call(-0.1, 0.0, p, 1.0, 1.0), InvalidParam);
    }
}

TEST_CASE("put-call parity holds per path") {
    const HestonParams p = paper_params();
    for (long i = 0; i < 25; ++i) {
        PathRng rng(11, static_cast<std::uint64_t>(i), 0);
        const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
        const auto [i_T, j_T] = terminal_functionals(path, p);
        const auto in = conditional_inputs(i_T, j_T, p, 1.0);
        const double call = conditional_call(i_T, j_T, p, 1.1, 1.0);
        const double put = conditional_put(i_T, j_T, p, 1.1, 1.0);
        CHECK(call - put ==
              doctest::Approx(in.eff_spot - 1.1 * std::exp(-0.03)).epsilon(1e-10));
    }
}

TEST_CASE("exponential martingale has unit mean") {
    const HestonParams p = paper_params();
    const long n = 50000;
    std::vector<double> mart(n);
    parallel_for(n, [&](long i) {
        PathRng rng(12, static_cast<std::uint64_t>(i), 0);
        const VariancePath path = simulate_variance_path(p, 1.0, 52, rng);
        const auto [i_T, j_T] = terminal_functionals(path, p);
        mart[i] = std::exp(-0.5 * p.rho * p.rho * i_T + p.rho * j_T);
    });
    const auto est = mean_std_error(mart);
    CHECK(std::abs(est.mean - 1.0) < 3.0 * est.std_error + 2e-3);
}

TEST_CASE("conditional monte carlo matches the transform price") {
    const HestonParams p = paper_params();
    const VanillaContract c = make_vanilla_contract(OptionKind::Call, 1.0, 1.0);
    const PricingResult mc = willard_mc_price(p, c, 40000, 99, 52);
    const double ll = lewis_lipton_call(p, 1.0, 1.0);
    CHECK(mc.std_error > 0.0);
    CHECK(std::abs(mc.price - ll) < 3.0 * mc.std_error + 2e-3);
}

TEST_CASE("deterministic variance limit") {
    // rho = 0 as well: with rho != 0 the variance-shock functional J keeps
    // the per-path price random even when the variance path is flat.
    HestonParams p = paper_params();
    p.epsilon = 1e-6;
    p.kappa = 1e-6;
    p.theta = p.v0;
    p.rho = 0.0;
    const VanillaContract c = make_vanilla_contract(OptionKind::Call, 1.0, 1.0);
    const PricingResult mc = willard_mc_price(p, c, 1000, 5, 52);
    CHECK(std::abs(mc.price - bs_call(1.0, 1.0, 1.0, 0.03, std::sqrt(p.v0))) < 1e-5);
}

TEST_CASE("standard error shrinks like the square root of the path count") {
    const HestonParams p = paper_params();
    const VanillaContract c = make_vanilla_contract(OptionKind::Call, 1.0, 1.0);
    const PricingResult small = willard_mc_price(p, c, 10000, 7, 52);
    const PricingResult big = willard_mc_price(p, c, 40000, 7, 52);
    CHECK(big.std_error < small.std_error);
    CHECK(std::abs(small.std_error / big.std_error - 2.0) < 0.4);
}

TEST_CASE("same seed gives identical results") {
    const HestonParams p = paper_params();
    const VanillaContract c = make_vanilla_contract(OptionKind::Call, 1.0, 1.0);
    const PricingResult a = willard_mc_price(p, c, 2000, 31, 52);
    const PricingResult b = willard_mc_price(p, c, 2000, 31, 52);
    CHECK(a.price == b.price);
    CHECK(a.std_error == b.std_error);
}
