#include "svbarrier/mcs2d.hpp"

#include <chrono>
#include <cmath>
#include <vector>

#include "svbarrier/parallel.hpp"
#include "svbarrier/variance_paths.hpp"

namespace svb {

namespace {

// Terminal log-spot and accumulated survival weight of one simulated path;
// weight 0 marks a knockout.
struct PathEnd {
    double x;
    double weight;
};

PathEnd path_end(const HestonParams& p, double xi, double maturity, const Mcs2dConfig& cfg,
                 long path_index) {
    PathRng vrng(cfg.seed, static_cast<std::uint64_t>(path_index), 0);
    PathRng srng(cfg.seed, static_cast<std::uint64_t>(path_index), 1);

    const double dt = maturity / cfg.k_steps;
    const double sq_dt = std::sqrt(dt);
    const double rho_c = std::sqrt(1.0 - p.rho * p.rho);

    double v = p.v0;
    double x = 0.0;
    double weight = 1.0;
    for (int k = 1; k <= cfg.k_steps; ++k) {
        const double v_pos = std::max(v, 0.0);
        const double eta = vrng.normal();
        const double zeta = srng.normal();
        const double x_prev = x;
        x += (p.r - 0.5 * v_pos) * dt +
             std::sqrt(v_pos) * sq_dt * (p.rho * eta + rho_c * zeta);
        v += p.kappa * (p.theta - v_pos) * dt + p.epsilon * std::sqrt(v_pos) * sq_dt * eta;
        if (x <= xi) return {x, 0.0};
        if (cfg.bridge && v_pos > 0.0) {
            weight *= 1.0 - std::exp(-2.0 * (x_prev - xi) * (x - xi) / (v_pos * dt));
            if (weight <= 0.0) return {x, 0.0};
        }
    }
    return {x, weight};
}

double path_value(const HestonParams& p, const BarrierContract& c, const Mcs2dConfig& cfg,
                  long path_index) {
    const PathEnd end = path_end(p, c.log_barrier, c.maturity, cfg, path_index);
    if (end.weight == 0.0) return 0.0;
    const double x = end.x;
    const double weight = end.weight;

    double payoff;
    switch (c.payoff_kind) {
        case PayoffKind::NoTouch: payoff = 1.0; break;
        case PayoffKind::DownOutCall:
            payoff = std::max(p.s0 * std::exp(x) - c.strike, 0.0);
            break;
        case PayoffKind::DownOutPut:
            payoff = std::max(c.strike - p.s0 * std::exp(x), 0.0);
            break;
        default: payoff = 0.0;
    }
    return weight * payoff;
}

}  // namespace

PricingResult mc2d_barrier_price(const HestonParams& p, const BarrierContract& c,
                                 const Mcs2dConfig& cfg) {
    validate_params(p);
    if (cfg.n_paths < 100) throw InvalidParam("n_paths", "must be >= 100");
    if (cfg.k_steps < 2) throw InvalidParam("k_steps", "must be >= 2");

    const auto start = std::chrono::steady_clock::now();
    std::vector<double> values(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](long i) { values[i] = path_value(p, c, cfg, i); });
    const auto est = mean_std_error(values);

    PricingResult res;
    res.price = std::exp(-p.r * c.maturity) * est.mean;
    res.std_error = std::exp(-p.r * c.maturity) * est.std_error;
    res.n_paths = cfg.n_paths;
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.method = Method::MCS2D;
    return res;
}

std::vector<PricingResult> mc2d_call_strip(const HestonParams& p, double barrier,
                                           std::span<const double> strikes, double maturity,
                                           const Mcs2dConfig& cfg) {
    validate_params(p);
    if (strikes.empty()) throw InvalidParam("strikes", "must not be empty");
    if (cfg.n_paths < 100) throw InvalidParam("n_paths", "must be >= 100");
    if (cfg.k_steps < 2) throw InvalidParam("k_steps", "must be >= 2");
    const double xi = std::log(barrier / p.s0);
    if (!(xi < 0.0)) throw InvalidParam("barrier", "must be below spot");

    const auto start = std::chrono::steady_clock::now();
    const std::size_t ns = strikes.size();
    std::vector<std::vector<double>> values(ns, std::vector<double>(cfg.n_paths, 0.0));
    parallel_for(cfg.n_paths, [&](long i) {
        const PathEnd end = path_end(p, xi, maturity, cfg, i);
        if (end.weight == 0.0) return;
        const double spot = p.s0 * std::exp(end.x);
        for (std::size_t s = 0; s < ns; ++s)
            values[s][i] = end.weight * std::max(spot - strikes[s], 0.0);
    });
    const double disc = std::exp(-p.r * maturity);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<PricingResult> out(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        const auto est = mean_std_error(values[s]);
        out[s].price = disc * est.mean;
        out[s].std_error = disc * est.std_error;
        out[s].n_paths = cfg.n_paths;
        out[s].elapsed = elapsed;
        out[s].method = Method::MCS2D;
    }
    return out;
}

}  // namespace svb
