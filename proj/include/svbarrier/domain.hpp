#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace svb {

// ---- error taxonomy ----------------------------------------------------
// ConfigError-family: bad user input, CLI exit code 2.
// NumericalError-family: a solver failed at runtime, CLI exit code 3.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParam : ConfigError {
    std::string field;
    InvalidParam(std::string f, const std::string& reason)
        : ConfigError("invalid parameter '" + f + "': " + reason), field(std::move(f)) {}
};

struct BarrierAboveSpot : ConfigError {
    using ConfigError::ConfigError;
};

struct DomainError : ConfigError {
    using ConfigError::ConfigError;
};

struct PriceOutOfBounds : ConfigError {
    using ConfigError::ConfigError;
};

struct QuadratureNotConverged : NumericalError {
    using NumericalError::NumericalError;
};

struct NoConvergence : NumericalError {
    using NumericalError::NumericalError;
};

struct SingularDenominator : NumericalError {
    using NumericalError::NumericalError;
};

struct SolverSingular : NumericalError {
    using NumericalError::NumericalError;
};

// ---- model parameters --------------------------------------------------

// Risk-neutral square-root stochastic variance model. All rates and
// variances are annualized.
struct HestonParams {
    double r;        // risk-free rate
    double kappa;    // mean-reversion speed
    double theta;    // long-run variance
    double epsilon;  // vol-of-vol
    double rho;      // correlation, -1 < rho < 1
    double v0;       // initial variance
    double s0;       // spot
};

// Throws InvalidParam on the first violated invariant.
void validate_params(const HestonParams& p);

// 2*kappa*theta >= epsilon^2. Informational only, never enforced: the path
// scheme truncates negative variance excursions.
bool feller_satisfied(const HestonParams& p);

// ---- contracts ---------------------------------------------------------

enum class PayoffKind { NoTouch, DownOutCall, DownOutPut };

struct BarrierContract {
    double maturity;
    double strike;       // NaN for NoTouch
    double barrier;      // lower barrier, 0 < B < s0
    PayoffKind payoff_kind;
    double log_barrier;  // xi = ln(B/s0) < 0
    double log_strike;   // k = ln(K/s0), NaN for NoTouch
};

// Validates invariants and fills the derived log fields.
BarrierContract make_barrier_contract(PayoffKind kind, double maturity, double barrier,
                                      double strike, double s0);

enum class OptionKind { Call, Put };

struct VanillaContract {
    double maturity;
    double strike;
    OptionKind kind;
};

VanillaContract make_vanilla_contract(OptionKind kind, double maturity, double strike);

// (xi, k) = (ln(B/s0), ln(K/s0)); k is NaN for no-touch contracts.
std::pair<double, double> to_log_contract(const BarrierContract& c, double s0);

// ---- results -----------------------------------------------------------

enum class Method { LewisLipton, WillardMC, HybridMHP, HybridFDM, MCS2D };

const char* method_name(Method m);

struct PricingResult {
    double price = 0.0;
    double std_error = 0.0;  // 0 for deterministic methods
    long n_paths = 0;
    double elapsed = 0.0;    // seconds
    Method method = Method::LewisLipton;
};

}  // namespace svb
