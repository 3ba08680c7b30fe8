#include "svbarrier/variance_paths.hpp"

#include <cmath>

namespace svb {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kIntegralFloor = 1e-12;  // keeps upsilon strictly increasing

inline std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t path_index, std::uint64_t stream) {
    // Mix the three identifiers into one counter seed.
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s) ^ (path_index * 0xd6e8feb86659fd93ULL);
    std::uint64_t b = splitmix64(a) ^ (stream * 0xa5cb3d8436c64a05ULL);
    state_ = splitmix64(b);
}

double PathRng::uniform() {
    const std::uint64_t x = splitmix64(state_);
    const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double PathRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    cached_ = rad * std::sin(kTwoPi * u2);
    has_cached_ = true;
    return rad * std::cos(kTwoPi * u2);
}

VariancePath simulate_variance_path(const HestonParams& p, double maturity, int k_steps,
                                    PathRng& rng, bool literal_euler) {
    if (k_steps < 2) throw InvalidParam("k_steps", "must be >= 2");
    if (!(maturity > 0.0)) throw InvalidParam("maturity", "must be > 0");

    VariancePath path;
    path.dt = maturity / k_steps;
    path.v.resize(k_steps + 1);
    path.i.resize(k_steps + 1);
    path.t.resize(k_steps + 1);
    path.v[0] = p.v0;
    path.i[0] = 0.0;
    path.t[0] = 0.0;

    const double sq_dt = std::sqrt(path.dt);
    for (int k = 1; k <= k_steps; ++k) {
        const double prev = path.v[k - 1];
        const double prev_pos = std::max(prev, 0.0);
        const double eta = rng.normal();
        const double diffusion = literal_euler ? p.epsilon : p.epsilon * std::sqrt(prev_pos);
        path.v[k] = prev + p.kappa * (p.theta - prev_pos) * path.dt + diffusion * sq_dt * eta;
        const double cur_pos = std::max(path.v[k], 0.0);
        path.i[k] = path.i[k - 1] +
                    path.dt * std::max(0.5 * (cur_pos + prev_pos), kIntegralFloor);
        path.t[k] = k * path.dt;
    }
    return path;
}

ConditionalCoefficients conditional_coeffs(const VariancePath& path, const HestonParams& p) {
    const std::size_t n = path.v.size();
    ConditionalCoefficients c;
    c.mu.resize(n);
    c.nu.resize(n);
    c.m.resize(n);
    c.upsilon.resize(n);

    const double drift_const = p.r - p.rho * p.kappa * p.theta / p.epsilon;
    const double var_coeff = 0.5 - p.rho * p.kappa / p.epsilon;
    const double rho_over_eps = p.rho / p.epsilon;
    const double one_m_rho2 = 1.0 - p.rho * p.rho;

    for (std::size_t k = 0; k < n; ++k) {
        const double v_pos = std::max(path.v[k], 0.0);
        c.nu[k] = std::sqrt(one_m_rho2) * std::sqrt(v_pos);
        c.mu[k] = drift_const - var_coeff * path.v[k];
        if (k > 0) c.mu[k] += rho_over_eps * (path.v[k] - path.v[k - 1]) / path.dt;
        c.m[k] = path.t[k] * drift_const - var_coeff * path.i[k] +
                 rho_over_eps * (path.v[k] - path.v[0]);
        c.upsilon[k] = one_m_rho2 * path.i[k];
    }
    c.m[0] = 0.0;
    c.big_upsilon = c.upsilon.back();
    return c;
}

std::pair<double, double> terminal_functionals(const VariancePath& path, const HestonParams& p) {
    const double maturity = path.t.back();
    const double i_T = path.i.back();
    const double j_T =
        (path.v.back() - path.v.front() - p.kappa * p.theta * maturity + p.kappa * i_T) /
        p.epsilon;
    return {i_T, j_T};
}

}  // namespace svb
