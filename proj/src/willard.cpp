#include "svbarrier/willard.hpp"

#include <chrono>
#include <cmath>

#include "svbarrier/parallel.hpp"
#include "svbarrier/vanilla_analytic.hpp"

namespace svb {

MeanStdErr mean_std_error(const std::vector<double>& samples) {
    const long n = static_cast<long>(samples.size());
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    MeanStdErr out;
    out.mean = mean;
    out.std_error = n > 1 ? std::sqrt(ss / (static_cast<double>(n) * (n - 1))) : 0.0;
    return out;
}

ConditionalVanillaInputs conditional_inputs(double i_T, double j_T, const HestonParams& p,
                                            double maturity) {
    if (!(i_T >= 0.0)) throw InvalidParam("i_T", "must be >= 0");
    ConditionalVanillaInputs in;
    in.eff_spot = p.s0 * std::exp(-0.5 * p.rho * p.rho * i_T + p.rho * j_T);
    in.eff_vol = std::sqrt(1.0 - p.rho * p.rho) * std::sqrt(i_T / maturity);
    return in;
}

double conditional_call(double i_T, double j_T, const HestonParams& p, double strike,
                        double maturity) {
    const auto in = conditional_inputs(i_T, j_T, p, maturity);
    return bs_call(in.eff_spot, strike, maturity, p.r, in.eff_vol);
}

double conditional_put(double i_T, double j_T, const HestonParams& p, double strike,
                       double maturity) {
    const auto in = conditional_inputs(i_T, j_T, p, maturity);
    return bs_put(in.eff_spot, strike, maturity, p.r, in.eff_vol);
}

PricingResult willard_mc_price(const HestonParams& p, const VanillaContract& c, long n_paths,
                               std::uint64_t seed, int k_steps) {
    validate_params(p);
    if (n_paths < 100) throw InvalidParam("n_paths", "must be >= 100");

    const auto start = std::chrono::steady_clock::now();
    std::vector<double> prices(n_paths);
    parallel_for(n_paths, [&](long i) {
        PathRng rng(seed, static_cast<std::uint64_t>(i), 0);
        const VariancePath path = simulate_variance_path(p, c.maturity, k_steps, rng);
        const auto [i_T, j_T] = terminal_functionals(path, p);
        prices[i] = c.kind == OptionKind::Call
                        ? conditional_call(i_T, j_T, p, c.strike, c.maturity)
                        : conditional_put(i_T, j_T, p, c.strike, c.maturity);
    });
    const auto est = mean_std_error(prices);

    PricingResult res;
    res.price = est.mean;
    res.std_error = est.std_error;
    res.n_paths = n_paths;
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.method = Method::WillardMC;
    return res;
}

}  // namespace svb
