#pragma once

#include <span>
#include <vector>

#include "svbarrier/heat_potentials.hpp"

namespace svb {

// Joint density of (running minimum, terminal value) of X = N + W on the
// clock, obtained by differentiating the absorbed-density single layer with
// respect to the barrier level: pi(a, b) = dF_a(b)/da. The potential density
// and its barrier-derivative solve the same Volterra equation with different
// right-hand sides, so one kernel factorization serves every terminal point.
class MinPdfSolver {
  public:
    explicit MinPdfSolver(const MovingBoundary& drift, int refine = 4);

    // a < 0 is the minimum level, b > a the terminal value.
    double joint_pdf(double a, double b);
    std::vector<double> joint_pdf_row(double a, std::span<const double> b);

    double big_upsilon() const { return u_.back(); }

  private:
    void densities_for(double a, std::vector<double>& phi, std::vector<double>& psi);

    std::vector<double> u_, n_;
    double cached_a_ = 0.0;
    bool have_cache_ = false;
    std::vector<double> phi_, psi_;
};

// Closed forms for zero and constant drift (reflection / Girsanov), used as
// oracles for the solver above.
double joint_pdf_bm(double maturity, double a, double b);
double joint_pdf_drifted(double maturity, double a, double b, double lambda);

// One-shot wrapper over MinPdfSolver for a given drift path.
double joint_pdf_time_dependent(const MovingBoundary& drift, double a, double b, int refine = 4);

// Survival probability P(min > a) for constant drift, for marginal checks.
double min_survival_drifted(double maturity, double a, double lambda);

}  // namespace svb
