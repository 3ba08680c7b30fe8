#include "svbarrier/vanilla_analytic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>

namespace svb {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirror for the rest).
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gl_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 8; ++i)
        s += kGlWeights[i] * (f(c - h * kGlNodes[i]) + f(c + h * kGlNodes[i]));
    return h * s;
}

// Integrates f over [0, inf): composite Gauss-Legendre panels up to chi_max,
// then keeps appending panels until one contributes less than tol.
double semi_infinite_integral(const std::function<double(double)>& f, const QuadratureSpec& q) {
    const int n_panels = std::max(1, q.n_nodes / 16);
    const double width = q.chi_max / n_panels;
    double total = 0.0;
    double last = 0.0;
    double a = 0.0;
    for (int i = 0; i < n_panels; ++i) {
        last = gl_panel(f, a, a + width);
        total += last;
        a += width;
    }
    int extra = 0;
    while (std::abs(last) > q.tol) {
        if (++extra > 8 * n_panels)
            throw QuadratureNotConverged("Fourier integral tail did not fall below tol");
        last = gl_panel(f, a, a + width);
        total += last;
        a += width;
    }
    return total;
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

double bs_call(double s0, double strike, double maturity, double r, double sigma) {
    if (!(s0 > 0.0 && strike > 0.0 && maturity > 0.0))
        throw InvalidParam("bs_call", "s0, strike, maturity must be > 0");
    if (!(sigma >= 0.0)) throw InvalidParam("sigma", "must be >= 0");
    const double df = std::exp(-r * maturity);
    if (sigma == 0.0) return std::max(s0 - strike * df, 0.0);
    const double st = sigma * std::sqrt(maturity);
    const double d_plus = (-std::log(strike / s0) + r * maturity + 0.5 * st * st) / st;
    const double d_minus = d_plus - st;
    return s0 * norm_cdf(d_plus) - df * strike * norm_cdf(d_minus);
}

double bs_put(double s0, double strike, double maturity, double r, double sigma) {
    return bs_call(s0, strike, maturity, r, sigma) - s0 + strike * std::exp(-r * maturity);
}

double bs_vega(double s0, double strike, double maturity, double r, double sigma) {
    if (sigma <= 0.0) return 0.0;
    const double st = sigma * std::sqrt(maturity);
    const double d_plus = (-std::log(strike / s0) + r * maturity + 0.5 * st * st) / st;
    return s0 * norm_pdf(d_plus) * std::sqrt(maturity);
}

double bs_call_fourier(double s0, double strike, double maturity, double r, double sigma,
                       const QuadratureSpec& q) {
    if (!(sigma > 0.0)) throw InvalidParam("sigma", "must be > 0 for the Fourier form");
    const double kf = std::log(strike / s0) - r * maturity;  // forward log-moneyness
    const double var = sigma * sigma * maturity;
    // Integrand is conjugate-symmetric in chi, so integrate twice the real part
    // over the positive half-axis.
    auto integrand = [&](double chi) {
        const double q2 = chi * chi + 0.25;
        return 2.0 * std::exp(0.5 * kf - 0.5 * q2 * var) * std::cos(chi * kf) / q2;
    };
    const double integral = semi_infinite_integral(integrand, q);
    return s0 * (1.0 - integral / (2.0 * kPi));
}

double lewis_lipton_call(const HestonParams& p, double strike, double maturity,
                         const QuadratureSpec& q) {
    validate_params(p);
    if (!(strike > 0.0 && maturity > 0.0))
        throw InvalidParam("lewis_lipton_call", "strike and maturity must be > 0");

    using cd = std::complex<double>;
    const double kf = std::log(strike / p.s0) - p.r * maturity;
    const double kappa_hat = p.kappa - 0.5 * p.rho * p.epsilon;
    const double eps2 = p.epsilon * p.epsilon;

    auto integrand = [&](double chi) {
        const double q2 = chi * chi + 0.25;
        const cd i_rho_eps_chi(0.0, p.rho * p.epsilon * chi);
        const cd zeta = std::sqrt(cd(eps2 * (1.0 - p.rho * p.rho) * chi * chi + kappa_hat * kappa_hat +
                                         0.25 * eps2,
                                     2.0 * p.epsilon * p.rho * kappa_hat * chi));
        const cd psi_plus = -(i_rho_eps_chi + kappa_hat) + zeta;
        const cd psi_minus = (i_rho_eps_chi + kappa_hat) + zeta;

        // ln((psi- + psi+ e^{-zeta t}) / (2 zeta)) tracked continuously in t so
        // the complex log cannot jump branches at long maturities.
        const int n_track = 16;
        cd g_prev(1.0, 0.0);
        double arg = 0.0;
        cd g(1.0, 0.0);
        for (int j = 1; j <= n_track; ++j) {
            const double t = maturity * j / n_track;
            g = (psi_minus + psi_plus * std::exp(-zeta * t)) / (2.0 * zeta);
            if (std::abs(g) < 1e-12)
                throw NumericalError("characteristic function denominator vanished");
            arg += std::arg(g / g_prev);
            g_prev = g;
        }
        const cd log_g(std::log(std::abs(g)), arg);

        const cd alpha = -(p.kappa * p.theta / eps2) * (psi_plus * maturity + 2.0 * log_g);
        const cd beta = (1.0 - std::exp(-zeta * maturity)) /
                        (psi_minus + psi_plus * std::exp(-zeta * maturity));
        const cd expo = cd(0.5, chi) * kf + alpha - q2 * beta * p.v0;
        return 2.0 * std::real(std::exp(expo)) / q2;
    };

    const double integral = semi_infinite_integral(integrand, q);
    return p.s0 * (1.0 - integral / (2.0 * kPi));
}

double implied_vol(double price, double s0, double strike, double maturity, double r) {
    const double intrinsic = std::max(s0 - strike * std::exp(-r * maturity), 0.0);
    if (!(price > intrinsic && price < s0))
        throw PriceOutOfBounds("call price outside the no-arbitrage interval");
    double lo = 1e-6, hi = 5.0;
    if (bs_call(s0, strike, maturity, r, hi) < price)
        throw NoConvergence("implied vol above the upper bracket");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double diff = bs_call(s0, strike, maturity, r, mid) - price;
        if (std::abs(diff) <= 1e-10) return mid;
        (diff < 0.0 ? lo : hi) = mid;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(bs_call(s0, strike, maturity, r, mid) - price) <= 1e-10) return mid;
    throw NoConvergence("implied vol bisection did not reach tolerance");
}

}  // namespace svb
