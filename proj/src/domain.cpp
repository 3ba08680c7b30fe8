#include "svbarrier/domain.hpp"

#include <limits>

namespace svb {

void validate_params(const HestonParams& p) {
    if (!(p.kappa >= 0.0)) throw InvalidParam("kappa", "must be >= 0");
    if (!(p.theta >= 0.0)) throw InvalidParam("theta", "must be >= 0");
    if (!(p.epsilon > 0.0)) throw InvalidParam("epsilon", "must be > 0");
    if (!(p.rho > -1.0 && p.rho < 1.0)) throw InvalidParam("rho", "must lie in (-1, 1)");
    if (!(p.v0 >= 0.0)) throw InvalidParam("v0", "must be >= 0");
    if (!(p.s0 > 0.0)) throw InvalidParam("s0", "must be > 0");
    if (!(p.r == p.r)) throw InvalidParam("r", "must be finite");
}

bool feller_satisfied(const HestonParams& p) {
    return 2.0 * p.kappa * p.theta >= p.epsilon * p.epsilon;
}

BarrierContract make_barrier_contract(PayoffKind kind, double maturity, double barrier,
                                      double strike, double s0) {
    if (!(maturity > 0.0)) throw InvalidParam("maturity", "must be > 0");
    if (!(s0 > 0.0)) throw InvalidParam("s0", "must be > 0");
    if (!(barrier > 0.0)) throw InvalidParam("barrier", "must be > 0");
    if (barrier >= s0) throw BarrierAboveSpot("barrier must lie strictly below spot");

    BarrierContract c;
    c.maturity = maturity;
    c.barrier = barrier;
    c.payoff_kind = kind;
    c.log_barrier = std::log(barrier / s0);
    if (kind == PayoffKind::NoTouch) {
        c.strike = std::numeric_limits<double>::quiet_NaN();
        c.log_strike = std::numeric_limits<double>::quiet_NaN();
    } else {
        if (!(strike > 0.0)) throw InvalidParam("strike", "must be > 0");
        c.strike = strike;
        c.log_strike = std::log(strike / s0);
    }
    return c;
}

VanillaContract make_vanilla_contract(OptionKind kind, double maturity, double strike) {
    if (!(maturity > 0.0)) throw InvalidParam("maturity", "must be > 0");
    if (!(strike > 0.0)) throw InvalidParam("strike", "must be > 0");
    return VanillaContract{maturity, strike, kind};
}

std::pair<double, double> to_log_contract(const BarrierContract& c, double s0) {
    if (c.barrier >= s0) throw BarrierAboveSpot("barrier must lie strictly below spot");
    return {std::log(c.barrier / s0),
            c.payoff_kind == PayoffKind::NoTouch
                ? std::numeric_limits<double>::quiet_NaN()
                : std::log(c.strike / s0)};
}

const char* method_name(Method m) {
    switch (m) {
        case Method::LewisLipton: return "LewisLipton";
        case Method::WillardMC: return "WillardMC";
        case Method::HybridMHP: return "HybridMHP";
        case Method::HybridFDM: return "HybridFDM";
        case Method::MCS2D: return "MCS2D";
    }
    return "?";
}

}  // namespace svb
