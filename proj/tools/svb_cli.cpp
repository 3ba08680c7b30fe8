#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "svbarrier/engine.hpp"
#include "svbarrier/heat_potentials.hpp"
#include "svbarrier/mcs2d.hpp"
#include "svbarrier/minpdf.hpp"
#include "svbarrier/vanilla_analytic.hpp"
#include "svbarrier/variance_paths.hpp"
#include "svbarrier/willard.hpp"

namespace {

using namespace svb;

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> paths;
    std::optional<int> steps;
    std::optional<std::string> out;
    std::optional<std::string> methods;  // comma-separated
};

std::vector<Method> split_methods(const std::string& list) {
    std::vector<Method> out;
    std::string cur;
    for (char c : list + ",") {
        if (c == ',') {
            if (!cur.empty()) {
                if (cur == "lewis_lipton") out.push_back(Method::LewisLipton);
                else if (cur == "willard_mc") out.push_back(Method::WillardMC);
                else if (cur == "hybrid_mhp") out.push_back(Method::HybridMHP);
                else if (cur == "hybrid_fdm") out.push_back(Method::HybridFDM);
                else if (cur == "mcs2d") out.push_back(Method::MCS2D);
                else throw ConfigError("unknown method '" + cur + "'");
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    return out;
}

ExperimentConfig base_config(const GlobalFlags& g) {
    ExperimentConfig cfg;
    if (!g.config_path.empty()) cfg = load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    if (g.steps) cfg.k_steps = *g.steps;
    if (g.out) cfg.out_dir = *g.out;
    if (g.methods) cfg.methods = split_methods(*g.methods);
    if (g.paths)
        for (Method m : {Method::WillardMC, Method::HybridMHP, Method::HybridFDM, Method::MCS2D})
            cfg.n_paths[m] = *g.paths;
    return cfg;
}

void print_report(const ComparisonReport& report) {
    for (const auto& row : report.rows)
        std::printf("%-12s price=%s se=%s paths=%ld elapsed=%.3fs\n", method_name(row.method),
                    format_sig(row.result.price).c_str(),
                    format_sig(row.result.std_error).c_str(), row.result.n_paths,
                    row.result.elapsed);
    for (const auto& pr : report.pairs)
        std::printf("|%s - %s| = %s (combined se %s)\n", method_name(pr.a), method_name(pr.b),
                    format_sig(pr.abs_diff).c_str(), format_sig(pr.combined_se).c_str());
}

int cmd_vanilla(const GlobalFlags& g, double strike, double maturity, bool is_put) {
    ExperimentConfig cfg = base_config(g);
    if (!cfg.vanilla)
        cfg.vanilla = make_vanilla_contract(is_put ? OptionKind::Put : OptionKind::Call,
                                            maturity, strike);
    if (cfg.methods.empty()) cfg.methods = {Method::LewisLipton, Method::WillardMC};
    print_report(run_experiment(cfg));
    return 0;
}

int cmd_barrier(const GlobalFlags& g, const std::string& type, double barrier, double strike,
                double maturity) {
    ExperimentConfig cfg = base_config(g);
    if (!cfg.barrier) {
        PayoffKind kind;
        if (type == "no_touch") kind = PayoffKind::NoTouch;
        else if (type == "down_out_call") kind = PayoffKind::DownOutCall;
        else if (type == "down_out_put") kind = PayoffKind::DownOutPut;
        else throw ConfigError("unknown barrier type '" + type + "'");
        cfg.barrier = make_barrier_contract(kind, maturity, barrier, strike, cfg.model.s0);
    }
    if (cfg.methods.empty()) cfg.methods = {Method::HybridMHP};
    print_report(run_experiment(cfg));
    return 0;
}

int cmd_green(const GlobalFlags& g, double barrier, double maturity) {
    ExperimentConfig cfg = base_config(g);
    if (cfg.methods.empty()) cfg.methods = {Method::HybridMHP, Method::HybridFDM};
    const double xi = std::log(barrier / cfg.model.s0);

    HybridConfig hc;
    hc.k_steps = cfg.k_steps;
    hc.refine = cfg.refine;
    hc.seed = cfg.seed;
    hc.fdm = cfg.fdm;
    const auto it = cfg.n_paths.find(Method::HybridMHP);
    hc.n_paths = it != cfg.n_paths.end() ? it->second : default_paths(Method::HybridMHP);

    std::vector<std::vector<double>> columns;
    std::vector<std::string> header{"x"};
    std::vector<AveragedGreen> curves;
    for (Method m : cfg.methods) {
        if (m != Method::HybridMHP && m != Method::HybridFDM)
            throw ConfigError("green supports hybrid_mhp and hybrid_fdm only");
        curves.push_back(averaged_green(cfg.model, xi, maturity, m, hc));
        header.push_back(m == Method::HybridMHP ? "density_mhp" : "density_fdm");
    }
    std::filesystem::create_directories(cfg.out_dir);
    std::vector<std::vector<double>> rows(curves[0].x.size());
    for (std::size_t j = 0; j < curves[0].x.size(); ++j) {
        rows[j].push_back(curves[0].x[j]);
        for (const auto& c : curves) rows[j].push_back(c.density[j]);
    }
    write_csv(cfg.out_dir + "/green.csv", header, rows);
    write_manifest(cfg.out_dir + "/run-manifest.txt", cfg, {});
    std::printf("wrote %s/green.csv (%zu points, %zu curves)\n", cfg.out_dir.c_str(),
                curves[0].x.size(), curves.size());
    return 0;
}

int cmd_minpdf(const GlobalFlags& g, double maturity) {
    ExperimentConfig cfg = base_config(g);
    // Drift path of the first seeded variance path; pi(a, b) over a small grid.
    PathRng rng(cfg.seed, 0, 0);
    const VariancePath path = simulate_variance_path(cfg.model, maturity, cfg.k_steps, rng);
    const ConditionalCoefficients coeffs = conditional_coeffs(path, cfg.model);
    MovingBoundary drift{coeffs.upsilon, coeffs.m};
    MinPdfSolver solver(drift, cfg.refine);
    const double big = solver.big_upsilon();

    std::vector<std::vector<double>> rows;
    for (double a = -2.0 * std::sqrt(big); a < -0.05; a += 0.1 * std::sqrt(big)) {
        std::vector<double> b_grid;
        for (double b = a + 0.05; b < 3.0 * std::sqrt(big); b += 0.1 * std::sqrt(big))
            b_grid.push_back(b);
        const std::vector<double> pi = solver.joint_pdf_row(a, b_grid);
        for (std::size_t j = 0; j < b_grid.size(); ++j)
            rows.push_back({a, b_grid[j], pi[j]});
    }
    std::filesystem::create_directories(cfg.out_dir);
    write_csv(cfg.out_dir + "/minpdf.csv", {"a", "b", "pi"}, rows);
    write_manifest(cfg.out_dir + "/run-manifest.txt", cfg, {});
    std::printf("wrote %s/minpdf.csv (%zu rows)\n", cfg.out_dir.c_str(), rows.size());
    return 0;
}

int cmd_bench(const GlobalFlags& g) {
    ExperimentConfig cfg = base_config(g);
    if (!cfg.barrier)
        cfg.barrier = make_barrier_contract(PayoffKind::DownOutCall, 1.0, 0.9, 1.0,
                                            cfg.model.s0);
    HybridConfig hc;
    hc.k_steps = cfg.k_steps;
    hc.refine = cfg.refine;
    hc.seed = cfg.seed;
    hc.fdm = cfg.fdm;
    const auto it = cfg.n_paths.find(Method::HybridMHP);
    hc.n_paths = it != cfg.n_paths.end() ? it->second : 50;

    const BenchReport rep = bench_inner_solvers(cfg.model, *cfg.barrier, hc);
    std::printf("paths: %ld\n", rep.n_paths);
    std::printf("mhp_per_path_seconds: %s\n", format_sig(rep.mhp_per_path).c_str());
    std::printf("fdm_per_path_seconds: %s\n", format_sig(rep.fdm_per_path).c_str());
    std::printf("fdm_over_mhp_ratio: %s\n", format_sig(rep.ratio).c_str());
    std::printf("max_abs_price_diff: %s\n", format_sig(rep.max_abs_diff).c_str());
    std::filesystem::create_directories(cfg.out_dir);
    write_csv(cfg.out_dir + "/bench.csv",
              {"n_paths", "mhp_per_path_seconds", "fdm_per_path_seconds", "fdm_over_mhp_ratio",
               "max_abs_price_diff"},
              {{static_cast<double>(rep.n_paths), rep.mhp_per_path, rep.fdm_per_path, rep.ratio,
                rep.max_abs_diff}});
    write_manifest(cfg.out_dir + "/run-manifest.txt", cfg, {});
    return 0;
}

// ---- figure presets ----------------------------------------------------

int repro_fig1(ExperimentConfig cfg) {
    const double strikes[] = {0.6, 0.8, 1.0, 1.25, 1.5};
    std::vector<std::vector<double>> rows;
    const auto it = cfg.n_paths.find(Method::WillardMC);
    const long n_paths = it != cfg.n_paths.end() ? it->second : default_paths(Method::WillardMC);
    for (double k : strikes) {
        const double ll = lewis_lipton_call(cfg.model, k, 1.0);
        const VanillaContract c = make_vanilla_contract(OptionKind::Call, 1.0, k);
        const PricingResult mc = willard_mc_price(cfg.model, c, n_paths, cfg.seed, cfg.k_steps);
        const double ll_iv = implied_vol(ll, cfg.model.s0, k, 1.0, cfg.model.r);
        const double mc_iv = implied_vol(mc.price, cfg.model.s0, k, 1.0, cfg.model.r);
        const double vega = bs_vega(cfg.model.s0, k, 1.0, cfg.model.r, mc_iv);
        rows.push_back({k, ll_iv, mc_iv, mc.std_error / vega});
    }
    write_csv(cfg.out_dir + "/fig1.csv", {"strike", "iv_analytic", "iv_mc", "iv_mc_se"}, rows);
    return 0;
}

int repro_fig5(const ExperimentConfig& cfg) {
    const double xi = -0.5, lambda = 0.5;
    const int n = 1000;
    MovingBoundary b;
    b.nodes.resize(n + 1);
    b.n.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        b.nodes[k] = static_cast<double>(k) / n;
        b.n[k] = lambda * b.nodes[k];
    }
    MhpSolver solver(b, xi, 1);
    const auto& sol = const_cast<MhpSolver&>(solver).green_density();
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= n; ++k) {
        const double exact = constant_drift_phi(sol.grid[k], xi, lambda);
        rows.push_back({sol.grid[k], sol.phi[k], exact, sol.phi[k] - exact});
    }
    write_csv(cfg.out_dir + "/fig5.csv", {"upsilon", "phi_numeric", "phi_exact", "diff"}, rows);
    return 0;
}

struct PathSolvers {
    ConditionalCoefficients coeffs;
    double dt;
};

PathSolvers seeded_path(const ExperimentConfig& cfg, long index, double maturity) {
    PathRng rng(cfg.seed, static_cast<std::uint64_t>(index), 0);
    const VariancePath path = simulate_variance_path(cfg.model, maturity, cfg.k_steps, rng);
    return {conditional_coeffs(path, cfg.model), path.dt};
}

int repro_fig6(const ExperimentConfig& cfg) {
    const double xi = -0.5;
    const PathSolvers ps = seeded_path(cfg, 0, 1.0);
    FdmConfig fdm = cfg.fdm;
    if (fdm.x_max <= 0.0) fdm.x_max = 3.0;
    SpatialGrid grid;
    const std::vector<double> g_fdm = cn_forward_green(ps.coeffs, ps.dt, xi, fdm, grid);
    MovingBoundary b{ps.coeffs.upsilon, ps.coeffs.m};
    MhpSolver solver(b, xi, cfg.refine);
    const std::vector<double> g_mhp = solver.green(grid.x);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < grid.x.size(); ++j)
        rows.push_back({grid.x[j], g_mhp[j], g_fdm[j], g_mhp[j] - g_fdm[j]});
    write_csv(cfg.out_dir + "/fig6.csv", {"x", "green_mhp", "green_fdm", "diff"}, rows);
    return 0;
}

int repro_per_path_prices(const ExperimentConfig& cfg, PayoffKind kind, double strike,
                          const std::string& file) {
    const double barrier = cfg.model.s0 * std::exp(-0.5);
    const BarrierContract c =
        make_barrier_contract(kind, 1.0, barrier, strike, cfg.model.s0);
    std::vector<std::vector<double>> rows;
    for (long i = 0; i < 20; ++i) {
        const PathSolvers ps = seeded_path(cfg, i, 1.0);
        MovingBoundary b{ps.coeffs.upsilon, ps.coeffs.m};
        MhpSolver solver(b, c.log_barrier, cfg.refine);
        const double mhp = kind == PayoffKind::NoTouch
                               ? solver.no_touch(cfg.model.r, 1.0, InnerMode::Forward)
                               : solver.barrier_call(c.log_strike, cfg.model.r, 1.0,
                                                     cfg.model.s0, InnerMode::Forward);
        const double fdm = cn_backward_price(ps.coeffs, ps.dt, c.log_barrier, kind,
                                             c.log_strike, cfg.model.r, 1.0, cfg.model.s0,
                                             cfg.fdm);
        rows.push_back({static_cast<double>(i), mhp, fdm, mhp - fdm});
    }
    write_csv(cfg.out_dir + "/" + file, {"path", "price_mhp", "price_fdm", "diff"}, rows);
    return 0;
}

int repro_fig9(const ExperimentConfig& cfg) {
    HybridConfig hc;
    hc.k_steps = cfg.k_steps;
    hc.refine = cfg.refine;
    hc.seed = cfg.seed;
    hc.fdm = cfg.fdm;
    const auto it = cfg.n_paths.find(Method::HybridMHP);
    hc.n_paths = it != cfg.n_paths.end() ? it->second : default_paths(Method::HybridMHP);
    const AveragedGreen mhp = averaged_green(cfg.model, -0.5, 1.0, Method::HybridMHP, hc);
    const AveragedGreen fdm = averaged_green(cfg.model, -0.5, 1.0, Method::HybridFDM, hc);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < mhp.x.size(); ++j)
        rows.push_back({mhp.x[j], mhp.density[j], fdm.density[j]});
    write_csv(cfg.out_dir + "/fig9.csv", {"x", "density_mhp", "density_fdm"}, rows);
    return 0;
}

int repro_fig10(ExperimentConfig cfg) {
    cfg.barrier = make_barrier_contract(PayoffKind::NoTouch, 1.0,
                                        cfg.model.s0 * std::exp(-0.5), 0.0, cfg.model.s0);
    cfg.vanilla.reset();
    if (cfg.methods.empty())
        cfg.methods = {Method::HybridMHP, Method::HybridFDM, Method::MCS2D};
    const ComparisonReport report = run_methods(cfg);
    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    std::vector<double> prices, ses;
    for (const auto& row : report.rows) {
        header.push_back(std::string("price_") + method_name(row.method));
        prices.push_back(row.result.price);
    }
    for (const auto& row : report.rows) {
        header.push_back(std::string("se_") + method_name(row.method));
        prices.push_back(row.result.std_error);
    }
    rows.push_back(prices);
    write_csv(cfg.out_dir + "/fig10.csv", header, rows);
    return 0;
}

int repro_fig11(ExperimentConfig cfg) {
    std::vector<std::vector<double>> rows;
    for (double k = 0.8; k <= 1.3001; k += 0.1) {
        cfg.barrier = make_barrier_contract(PayoffKind::DownOutCall, 1.0, 0.9, k, cfg.model.s0);
        cfg.vanilla.reset();
        ExperimentConfig local = cfg;
        local.methods = {Method::HybridMHP, Method::MCS2D};
        const ComparisonReport report = run_methods(local);
        rows.push_back({k, report.rows[0].result.price, report.rows[0].result.std_error,
                        report.rows[1].result.price, report.rows[1].result.std_error});
    }
    write_csv(cfg.out_dir + "/fig11.csv",
              {"strike", "price_mhp", "se_mhp", "price_mcs", "se_mcs"}, rows);
    return 0;
}

int cmd_repro(const GlobalFlags& g, const std::string& fig) {
    ExperimentConfig cfg = base_config(g);
    std::filesystem::create_directories(cfg.out_dir);
    int rc;
    if (fig == "fig1") rc = repro_fig1(cfg);
    else if (fig == "fig5") rc = repro_fig5(cfg);
    else if (fig == "fig6") rc = repro_fig6(cfg);
    else if (fig == "fig7") rc = repro_per_path_prices(cfg, PayoffKind::NoTouch, 0.0, "fig7.csv");
    else if (fig == "fig8") rc = repro_per_path_prices(cfg, PayoffKind::DownOutCall, 1.0, "fig8.csv");
    else if (fig == "fig9") rc = repro_fig9(cfg);
    else if (fig == "fig10") rc = repro_fig10(cfg);
    else if (fig == "fig11") rc = repro_fig11(cfg);
    else throw ConfigError("unknown figure preset '" + fig + "'");
    write_manifest(cfg.out_dir + "/run-manifest.txt", cfg, {});
    std::printf("wrote %s/%s.csv\n", cfg.out_dir.c_str(), fig.c_str());
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"barrier option pricing under stochastic variance"};
    app.require_subcommand(1);

    GlobalFlags g;
    app.add_option("--config", g.config_path, "JSON config file");
    std::uint64_t seed_val = 0;
    long paths_val = 0;
    int steps_val = 0;
    std::string out_val, methods_val;
    auto* seed_opt = app.add_option("--seed", seed_val, "master RNG seed");
    auto* paths_opt = app.add_option("--paths", paths_val, "Monte Carlo path count");
    auto* steps_opt = app.add_option("--steps", steps_val, "variance steps per year");
    auto* out_opt = app.add_option("--out", out_val, "output directory");
    auto* method_opt = app.add_option("--method", methods_val, "comma-separated method list");

    double strike = 1.0, maturity = 1.0, barrier_level = 0.9;
    bool is_put = false;
    std::string barrier_type = "down_out_call", fig;

    auto* vanilla = app.add_subcommand("vanilla", "price a vanilla option");
    vanilla->add_option("--strike", strike, "strike");
    vanilla->add_option("--maturity", maturity, "maturity in years");
    vanilla->add_flag("--put", is_put, "price a put instead of a call");

    auto* barrier = app.add_subcommand("barrier", "price a lower-barrier option");
    barrier->add_option("--type", barrier_type, "no_touch | down_out_call | down_out_put");
    barrier->add_option("--barrier", barrier_level, "barrier level");
    barrier->add_option("--strike", strike, "strike");
    barrier->add_option("--maturity", maturity, "maturity in years");

    auto* green = app.add_subcommand("green", "path-averaged barrier density");
    green->add_option("--barrier", barrier_level, "barrier level");
    green->add_option("--maturity", maturity, "maturity in years");

    auto* minpdf = app.add_subcommand("minpdf", "joint density of minimum and terminal value");
    minpdf->add_option("--maturity", maturity, "maturity in years");

    auto* bench = app.add_subcommand("bench", "time the two inner solvers");

    auto* repro = app.add_subcommand("repro", "regenerate a figure dataset");
    repro->add_option("fig", fig, "fig1|fig5|fig6|fig7|fig8|fig9|fig10|fig11")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (seed_opt->count()) g.seed = seed_val;
    if (paths_opt->count()) g.paths = paths_val;
    if (steps_opt->count()) g.steps = steps_val;
    if (out_opt->count()) g.out = out_val;
    if (method_opt->count()) g.methods = methods_val;

    try {
        if (vanilla->parsed()) return cmd_vanilla(g, strike, maturity, is_put);
        if (barrier->parsed()) return cmd_barrier(g, barrier_type, barrier_level, strike, maturity);
        if (green->parsed()) return cmd_green(g, barrier_level, maturity);
        if (minpdf->parsed()) return cmd_minpdf(g, maturity);
        if (bench->parsed()) return cmd_bench(g);
        if (repro->parsed()) return cmd_repro(g, fig);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
