#include <doctest.h>

#include <cmath>

#include "svbarrier/heat_potentials.hpp"
#include "svbarrier/mcs2d.hpp"
#include "svbarrier/vanilla_analytic.hpp"

using namespace svb;

namespace {
HestonParams paper_params() { return {0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0}; }

// Discounted barrier-call price under geometric brownian motion, by
// quadrature of the payoff against the absorbed transition density.
double gbm_down_out_call(double s0, double strike, double barrier, double r, double sigma,
                         double maturity) {
    const double xi = std::log(barrier / s0);
    const double k = std::log(strike / s0);
    const double lam = (r - 0.5 * sigma * sigma) / (sigma * sigma);
    const double big = sigma * sigma * maturity;
    double acc = 0.0;
    const int n = 40000;
    const double h = (k + 10.0 * std::sqrt(big) - k) / n;
    for (int i = 0; i <= n; ++i) {
        const double x = k + i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * (std::exp(x) - std::exp(k)) * constant_drift_green(big, x, xi, lam);
    }
    return std::exp(-r * maturity) * s0 * acc * h;
}
}  // namespace

TEST_CASE("remote barrier recovers the vanilla transform price") {
    const HestonParams p = paper_params();
    const BarrierContract c =
        make_barrier_contract(PayoffKind::DownOutCall, 1.0, 1e-6, 1.0, 1.0);
    Mcs2dConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 101;
    const PricingResult mc = mc2d_barrier_price(p, c, cfg);
    const double ll = lewis_lipton_call(p, 1.0, 1.0);
    CHECK(std::abs(mc.price - ll) < 3.0 * mc.std_error + 2e-3);
}

TEST_CASE("degenerate variance dynamics match the lognormal barrier formula") {
    HestonParams p = paper_params();
    p.epsilon = 1e-6;
    p.kappa = 1e-6;
    p.v0 = 0.04;
    p.theta = p.v0;
    const double sigma = 0.2;
    const BarrierContract c =
        make_barrier_contract(PayoffKind::DownOutCall, 1.0, 0.85, 1.0, 1.0);
    Mcs2dConfig cfg;
    cfg.n_paths = 200000;
    cfg.k_steps = 208;
    cfg.seed = 7;
    const PricingResult mc = mc2d_barrier_price(p, c, cfg);
    const double exact = gbm_down_out_call(1.0, 1.0, 0.85, 0.03, sigma, 1.0);
    CHECK(std::abs(mc.price - exact) < 3.0 * mc.std_error + 2e-3);
}

TEST_CASE("no-touch price is a sub-discount-factor") {
    const HestonParams p = paper_params();
    const BarrierContract c =
        make_barrier_contract(PayoffKind::NoTouch, 1.0, 0.9, 0.0, 1.0);
    Mcs2dConfig cfg;
    cfg.n_paths = 20000;
    cfg.seed = 3;
    const PricingResult mc = mc2d_barrier_price(p, c, cfg);
    CHECK(mc.price >= 0.0);
    CHECK(mc.price <= std::exp(-0.03) + 1e-12);
}

TEST_CASE("skipping the crossing correction biases survival upward") {
    const HestonParams p = paper_params();
    const BarrierContract c =
        make_barrier_contract(PayoffKind::NoTouch, 1.0, 0.9, 0.0, 1.0);
    double gap_prev = 0.0;
    bool first = true;
    for (int steps : {52, 208, 832}) {
        Mcs2dConfig cfg;
        cfg.n_paths = 100000;
        cfg.k_steps = steps;
        cfg.seed = 17;
        const PricingResult with = mc2d_barrier_price(p, c, cfg);
        cfg.bridge = false;
        const PricingResult without = mc2d_barrier_price(p, c, cfg);
        const double gap = without.price - with.price;
        // Discrete monitoring only sees the endpoints, so it misses crossings.
        CHECK(gap > 0.0);
        if (!first) CHECK(gap < gap_prev);
        gap_prev = gap;
        first = false;
    }
}

TEST_CASE("standard error shrinks like the square root of the path count") {
    const HestonParams p = paper_params();
    const BarrierContract c =
        make_barrier_contract(PayoffKind::DownOutCall, 1.0, 0.9, 1.0, 1.0);
    Mcs2dConfig cfg;
    cfg.seed = 9;
    cfg.n_paths = 10000;
    const PricingResult small = mc2d_barrier_price(p, c, cfg);
    cfg.n_paths = 40000;
    const PricingResult big = mc2d_barrier_price(p, c, cfg);
    CHECK(std::abs(small.std_error / big.std_error - 2.0) < 0.4);
}

TEST_CASE("same seed gives identical results") {
    const HestonParams p = paper_params();
    const BarrierContract c =
        make_barrier_contract(PayoffKind::NoTouch, 1.0, 0.9, 0.0, 1.0);
    Mcs2dConfig cfg;
    cfg.n_paths = 5000;
    cfg.seed = 77;
    const PricingResult a = mc2d_barrier_price(p, c, cfg);
    const PricingResult b = mc2d_barrier_price(p, c, cfg);
    CHECK(a.price == b.price);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("call strip matches per-contract pricing on shared paths") {
    const HestonParams p{0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0};
    Mcs2dConfig cfg;
    cfg.n_paths = 2000;
    cfg.k_steps = 26;
    cfg.seed = 5;
    const std::vector<double> strikes{0.8, 1.0, 1.2};
    const auto strip = mc2d_call_strip(p, 0.9, strikes, 1.0, cfg);
    REQUIRE(strip.size() == strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const auto c = make_barrier_contract(PayoffKind::DownOutCall, 1.0, 0.9, strikes[i], 1.0);
        const PricingResult single = mc2d_barrier_price(p, c, cfg);
        CHECK(strip[i].price == doctest::Approx(single.price).epsilon(1e-12));
        CHECK(strip[i].std_error == doctest::Approx(single.std_error).epsilon(1e-12));
    }
    // Monotone in strike.
    CHECK(strip[0].price > strip[1].price);
    CHECK(strip[1].price > strip[2].price);
}
