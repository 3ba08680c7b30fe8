#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "svbarrier/domain.hpp"
#include "svbarrier/fdm.hpp"
#include "svbarrier/heat_potentials.hpp"

namespace svb {

// Settings for one hybrid run: outer Monte Carlo over variance paths with a
// deterministic inner solve per path.
struct HybridConfig {
    long n_paths = 10000;
    int k_steps = 52;
    int refine = 4;  // inner grid subdivision, shared by MHP and FDM time axis
    std::uint64_t seed = 1;
    InnerMode mode = InnerMode::Forward;  // MHP induction direction
    bool extrapolate = false;  // Richardson step in refine for the MHP inner solve
    FdmConfig fdm;             // used when inner = HybridFDM
};

// inner must be HybridMHP or HybridFDM. Both consume identical variance
// paths for a given seed.
PricingResult price_barrier_hybrid(const HestonParams& p, const BarrierContract& c, Method inner,
                                   const HybridConfig& cfg);

// Down-and-out calls sharing one barrier, priced on shared variance paths
// with a single inner solve per path; one result per strike.
std::vector<PricingResult> hybrid_call_strip(const HestonParams& p, double barrier,
                                             std::span<const double> strikes, double maturity,
                                             const HybridConfig& cfg);

struct AveragedGreen {
    std::vector<double> x;
    std::vector<double> density;  // discounted, averaged over paths
};

// Path-averaged barrier Green's function on a fixed grid. For HybridFDM the
// grid is the finite-difference grid itself; for HybridMHP the potential is
// evaluated at the same nodes.
AveragedGreen averaged_green(const HestonParams& p, double xi, double maturity, Method inner,
                             const HybridConfig& cfg);

// ---- experiment harness ------------------------------------------------

struct ExperimentConfig {
    HestonParams model{0.03, 1.0, 0.2, 0.4, -0.3, 0.25, 1.0};
    std::optional<BarrierContract> barrier;
    std::optional<VanillaContract> vanilla;
    std::vector<Method> methods;
    std::map<Method, long> n_paths;  // per-method path counts
    int k_steps = 52;
    int refine = 4;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    FdmConfig fdm;
};

// Parses the JSON text; unknown keys anywhere are rejected with ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

long default_paths(Method m);

struct MethodRow {
    Method method;
    PricingResult result;
};

struct ComparisonReport {
    std::vector<MethodRow> rows;
    // |price_i - price_j| and combined standard errors for each pair (i < j).
    struct Pair {
        Method a, b;
        double abs_diff;
        double combined_se;
    };
    std::vector<Pair> pairs;
};

ComparisonReport run_methods(const ExperimentConfig& cfg);

// Runs all requested methods and writes results.csv plus a run manifest into
// cfg.out_dir. Returns the in-memory report.
ComparisonReport run_experiment(const ExperimentConfig& cfg);

struct BenchReport {
    double mhp_per_path;  // mean inner-solve seconds
    double fdm_per_path;
    double ratio;         // fdm / mhp
    double max_abs_diff;  // per-path price agreement at the benchmarked settings
    long n_paths;
};

// Times the two inner solvers on identical variance paths. The FDM settings
// in cfg.fdm must be sized for ~1e-3 per-path accuracy; max_abs_diff reports
// what was actually achieved.
BenchReport bench_inner_solvers(const HestonParams& p, const BarrierContract& c,
                                const HybridConfig& cfg);

// ---- output helpers ----------------------------------------------------

// One CSV cell with 10 significant digits.
std::string format_sig(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Stable content hash of the canonical config serialization.
std::uint64_t config_hash(const ExperimentConfig& cfg);

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, double>>& stage_seconds);

}  // namespace svb
