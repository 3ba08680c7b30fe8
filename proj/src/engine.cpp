#include "svbarrier/engine.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "svbarrier/mcs2d.hpp"
#include "svbarrier/parallel.hpp"
#include "svbarrier/variance_paths.hpp"
#include "svbarrier/vanilla_analytic.hpp"
#include "svbarrier/willard.hpp"

namespace svb {

namespace {

using nlohmann::json;

double inner_price_mhp(const HestonParams& p, const BarrierContract& c,
                       const ConditionalCoefficients& coeffs, const HybridConfig& cfg) {
    MovingBoundary b{coeffs.upsilon, coeffs.m};
    const auto value = [&](int refine) {
        MhpSolver solver(b, c.log_barrier, refine);
        switch (c.payoff_kind) {
            case PayoffKind::NoTouch:
                return solver.no_touch(p.r, c.maturity, cfg.mode);
            case PayoffKind::DownOutCall:
                return solver.barrier_call(c.log_strike, p.r, c.maturity, p.s0, cfg.mode);
            case PayoffKind::DownOutPut:
                return solver.barrier_put(c.log_strike, p.r, c.maturity, p.s0);
        }
        return 0.0;
    };
    const double fine = value(cfg.refine);
    if (!cfg.extrapolate || cfg.refine < 2) return fine;
    // The layer solve converges linearly in the subdivision, so one Richardson
    // step against the half-resolution grid removes the leading error term.
    return 2.0 * fine - value(cfg.refine / 2);
}

double inner_price_fdm(const HestonParams& p, const BarrierContract& c,
                       const ConditionalCoefficients& coeffs, double dt,
                       const HybridConfig& cfg) {
    return cn_backward_price(coeffs, dt, c.log_barrier, c.payoff_kind, c.log_strike, p.r,
                             c.maturity, p.s0, cfg.fdm);
}

}  // namespace

PricingResult price_barrier_hybrid(const HestonParams& p, const BarrierContract& c, Method inner,
                                   const HybridConfig& cfg) {
    validate_params(p);
    if (inner != Method::HybridMHP && inner != Method::HybridFDM)
        throw InvalidParam("inner", "hybrid pricing needs HybridMHP or HybridFDM");
    if (cfg.n_paths < 1) throw InvalidParam("n_paths", "must be >= 1");

    const auto start = std::chrono::steady_clock::now();
    std::vector<double> prices(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](long i) {
        try {
            PathRng rng(cfg.seed, static_cast<std::uint64_t>(i), 0);
            const VariancePath path = simulate_variance_path(p, c.maturity, cfg.k_steps, rng);
            const ConditionalCoefficients coeffs = conditional_coeffs(path, p);
            prices[i] = inner == Method::HybridMHP
                            ? inner_price_mhp(p, c, coeffs, cfg)
                            : inner_price_fdm(p, c, coeffs, path.dt, cfg);
        } catch (const NumericalError& e) {
            throw NumericalError("path " + std::to_string(i) + ": " + e.what());
        }
    });
    const auto est = mean_std_error(prices);

    PricingResult res;
    res.price = est.mean;
    res.std_error = est.std_error;
    res.n_paths = cfg.n_paths;
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.method = inner;
    return res;
}

std::vector<PricingResult> hybrid_call_strip(const HestonParams& p, double barrier,
                                             std::span<const double> strikes, double maturity,
                                             const HybridConfig& cfg) {
    validate_params(p);
    if (strikes.empty()) throw InvalidParam("strikes", "must not be empty");
    if (cfg.n_paths < 1) throw InvalidParam("n_paths", "must be >= 1");
    const double xi = std::log(barrier / p.s0);
    if (!(xi < 0.0)) throw InvalidParam("barrier", "must be below spot");

    const auto start = std::chrono::steady_clock::now();
    const std::size_t ns = strikes.size();
    std::vector<std::vector<double>> values(ns, std::vector<double>(cfg.n_paths));
    parallel_for(cfg.n_paths, [&](long i) {
        try {
            PathRng rng(cfg.seed, static_cast<std::uint64_t>(i), 0);
            const VariancePath path = simulate_variance_path(p, maturity, cfg.k_steps, rng);
            const ConditionalCoefficients coeffs = conditional_coeffs(path, p);
            MovingBoundary b{coeffs.upsilon, coeffs.m};
            MhpSolver fine(b, xi, cfg.refine);
            const bool extrap = cfg.extrapolate && cfg.refine >= 2;
            std::optional<MhpSolver> coarse;
            if (extrap) coarse.emplace(b, xi, cfg.refine / 2);
            for (std::size_t s = 0; s < ns; ++s) {
                const double k = std::log(strikes[s] / p.s0);
                double v = fine.barrier_call(k, p.r, maturity, p.s0, cfg.mode);
                if (extrap) v = 2.0 * v - coarse->barrier_call(k, p.r, maturity, p.s0, cfg.mode);
                values[s][i] = v;
            }
        } catch (const NumericalError& e) {
            throw NumericalError("path " + std::to_string(i) + ": " + e.what());
        }
    });
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::vector<PricingResult> out(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        const auto est = mean_std_error(values[s]);
        out[s].price = est.mean;
        out[s].std_error = est.std_error;
        out[s].n_paths = cfg.n_paths;
        out[s].elapsed = elapsed;
        out[s].method = Method::HybridMHP;
    }
    return out;
}

AveragedGreen averaged_green(const HestonParams& p, double xi, double maturity, Method inner,
                             const HybridConfig& cfg) {
    validate_params(p);
    if (inner != Method::HybridMHP && inner != Method::HybridFDM)
        throw InvalidParam("inner", "averaging needs HybridMHP or HybridFDM");

    // One shared grid for every path so curves are directly comparable:
    // freeze x_max up front instead of letting each path pick its own.
    FdmConfig fdm = cfg.fdm;
    if (fdm.x_max <= 0.0) fdm.x_max = 3.0;
    const SpatialGrid grid = make_spatial_grid(xi, fdm.x_max, fdm.m0);

    std::vector<std::vector<double>> per_path(cfg.n_paths);
    parallel_for(cfg.n_paths, [&](long i) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(i), 0);
        const VariancePath path = simulate_variance_path(p, maturity, cfg.k_steps, rng);
        const ConditionalCoefficients coeffs = conditional_coeffs(path, p);
        if (inner == Method::HybridMHP) {
            MovingBoundary b{coeffs.upsilon, coeffs.m};
            MhpSolver solver(b, xi, cfg.refine);
            per_path[i] = solver.green(grid.x);
        } else {
            SpatialGrid g_out;
            per_path[i] = cn_forward_green(coeffs, path.dt, xi, fdm, g_out);
        }
    });

    AveragedGreen out;
    out.x = grid.x;
    out.density.assign(grid.x.size(), 0.0);
    for (long i = 0; i < cfg.n_paths; ++i)
        for (std::size_t j = 0; j < out.density.size(); ++j)
            out.density[j] += per_path[i][j];
    const double scale = std::exp(-p.r * maturity) / static_cast<double>(cfg.n_paths);
    for (double& d : out.density) d *= scale;
    return out;
}

// ---- config ------------------------------------------------------------

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double require_number(const json& obj, const char* key, double fallback, bool* present = nullptr) {
    if (!obj.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

Method parse_method(const std::string& name) {
    if (name == "lewis_lipton") return Method::LewisLipton;
    if (name == "willard_mc") return Method::WillardMC;
    if (name == "hybrid_mhp") return Method::HybridMHP;
    if (name == "hybrid_fdm") return Method::HybridFDM;
    if (name == "mcs2d") return Method::MCS2D;
    throw ConfigError("unknown method '" + name + "'");
}

std::string method_key(Method m) {
    switch (m) {
        case Method::LewisLipton: return "lewis_lipton";
        case Method::WillardMC: return "willard_mc";
        case Method::HybridMHP: return "hybrid_mhp";
        case Method::HybridFDM: return "hybrid_fdm";
        case Method::MCS2D: return "mcs2d";
    }
    return "?";
}

}  // namespace

long default_paths(Method m) {
    switch (m) {
        case Method::LewisLipton: return 0;
        case Method::WillardMC: return 100000;
        case Method::HybridMHP:
        case Method::HybridFDM: return 10000;
        case Method::MCS2D: return 100000;
    }
    return 0;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(root,
                   {"model", "contract", "methods", "n_paths", "k_steps", "refine", "seed",
                    "out_dir", "fdm"},
                   "config root");

    ExperimentConfig cfg;
    if (root.contains("model")) {
        const json& m = root.at("model");
        if (!m.is_object()) throw ConfigError("'model' must be an object");
        reject_unknown(m, {"r", "kappa", "theta", "epsilon", "rho", "v0", "s0"}, "model");
        cfg.model.r = require_number(m, "r", cfg.model.r);
        cfg.model.kappa = require_number(m, "kappa", cfg.model.kappa);
        cfg.model.theta = require_number(m, "theta", cfg.model.theta);
        cfg.model.epsilon = require_number(m, "epsilon", cfg.model.epsilon);
        cfg.model.rho = require_number(m, "rho", cfg.model.rho);
        cfg.model.v0 = require_number(m, "v0", cfg.model.v0);
        cfg.model.s0 = require_number(m, "s0", cfg.model.s0);
    }
    validate_params(cfg.model);

    if (root.contains("contract")) {
        const json& c = root.at("contract");
        if (!c.is_object()) throw ConfigError("'contract' must be an object");
        reject_unknown(c, {"type", "maturity", "strike", "barrier"}, "contract");
        if (!c.contains("type") || !c.at("type").is_string())
            throw ConfigError("'contract.type' must be a string");
        const std::string type = c.at("type").get<std::string>();
        const double maturity = require_number(c, "maturity", 1.0);
        const double strike = require_number(c, "strike", 1.0);
        const double barrier = require_number(c, "barrier", 0.9);
        try {
            if (type == "no_touch")
                cfg.barrier = make_barrier_contract(PayoffKind::NoTouch, maturity, barrier, 0.0,
                                                    cfg.model.s0);
            else if (type == "down_out_call")
                cfg.barrier = make_barrier_contract(PayoffKind::DownOutCall, maturity, barrier,
                                                    strike, cfg.model.s0);
            else if (type == "down_out_put")
                cfg.barrier = make_barrier_contract(PayoffKind::DownOutPut, maturity, barrier,
                                                    strike, cfg.model.s0);
            else if (type == "vanilla_call")
                cfg.vanilla = make_vanilla_contract(OptionKind::Call, maturity, strike);
            else if (type == "vanilla_put")
                cfg.vanilla = make_vanilla_contract(OptionKind::Put, maturity, strike);
            else
                throw ConfigError("unknown contract type '" + type + "'");
        } catch (const ConfigError&) {
            throw;
        }
    }

    if (root.contains("methods")) {
        const json& ms = root.at("methods");
        if (!ms.is_array()) throw ConfigError("'methods' must be an array");
        for (const json& m : ms) {
            if (!m.is_string()) throw ConfigError("method names must be strings");
            cfg.methods.push_back(parse_method(m.get<std::string>()));
        }
    }

    if (root.contains("n_paths")) {
        const json& np = root.at("n_paths");
        if (np.is_number()) {
            for (Method m : {Method::WillardMC, Method::HybridMHP, Method::HybridFDM,
                             Method::MCS2D})
                cfg.n_paths[m] = np.get<long>();
        } else if (np.is_object()) {
            for (const auto& [key, val] : np.items()) {
                if (!val.is_number()) throw ConfigError("'n_paths' entries must be numbers");
                cfg.n_paths[parse_method(key)] = val.get<long>();
            }
        } else {
            throw ConfigError("'n_paths' must be a number or an object");
        }
    }

    cfg.k_steps = static_cast<int>(require_number(root, "k_steps", cfg.k_steps));
    cfg.refine = static_cast<int>(require_number(root, "refine", cfg.refine));
    if (cfg.k_steps < 2) throw ConfigError("'k_steps' must be >= 2");
    if (cfg.refine < 1) throw ConfigError("'refine' must be >= 1");
    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !s.is_number_integer())
            throw ConfigError("'seed' must be an integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("out_dir")) {
        if (!root.at("out_dir").is_string()) throw ConfigError("'out_dir' must be a string");
        cfg.out_dir = root.at("out_dir").get<std::string>();
    }
    if (root.contains("fdm")) {
        const json& f = root.at("fdm");
        if (!f.is_object()) throw ConfigError("'fdm' must be an object");
        reject_unknown(f, {"m0", "x_max", "time_refine"}, "fdm");
        cfg.fdm.m0 = static_cast<int>(require_number(f, "m0", cfg.fdm.m0));
        cfg.fdm.x_max = require_number(f, "x_max", cfg.fdm.x_max);
        cfg.fdm.time_refine = static_cast<int>(require_number(f, "time_refine",
                                                              cfg.fdm.time_refine));
        if (cfg.fdm.m0 < 4) throw ConfigError("'fdm.m0' must be >= 4");
        if (cfg.fdm.time_refine < 1) throw ConfigError("'fdm.time_refine' must be >= 1");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---- experiment execution ----------------------------------------------

namespace {

PricingResult run_one_method(const ExperimentConfig& cfg, Method m) {
    const auto paths_for = [&](Method mm) {
        const auto it = cfg.n_paths.find(mm);
        return it != cfg.n_paths.end() ? it->second : default_paths(mm);
    };
    HybridConfig hc;
    hc.k_steps = cfg.k_steps;
    hc.refine = cfg.refine;
    hc.seed = cfg.seed;
    hc.fdm = cfg.fdm;

    switch (m) {
        case Method::LewisLipton: {
            if (!cfg.vanilla) throw ConfigError("lewis_lipton needs a vanilla contract");
            const auto start = std::chrono::steady_clock::now();
            double call = lewis_lipton_call(cfg.model, cfg.vanilla->strike,
                                            cfg.vanilla->maturity);
            double price = call;
            if (cfg.vanilla->kind == OptionKind::Put)
                price = call - cfg.model.s0 +
                        cfg.vanilla->strike *
                            std::exp(-cfg.model.r * cfg.vanilla->maturity);
            PricingResult res;
            res.price = price;
            res.n_paths = 0;
            res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                              .count();
            res.method = m;
            return res;
        }
        case Method::WillardMC: {
            if (!cfg.vanilla) throw ConfigError("willard_mc needs a vanilla contract");
            return willard_mc_price(cfg.model, *cfg.vanilla, paths_for(m), cfg.seed,
                                    cfg.k_steps);
        }
        case Method::HybridMHP:
        case Method::HybridFDM: {
            if (!cfg.barrier) throw ConfigError("hybrid methods need a barrier contract");
            hc.n_paths = paths_for(m);
            return price_barrier_hybrid(cfg.model, *cfg.barrier, m, hc);
        }
        case Method::MCS2D: {
            if (!cfg.barrier) throw ConfigError("mcs2d needs a barrier contract");
            Mcs2dConfig mc;
            mc.n_paths = paths_for(m);
            mc.k_steps = cfg.k_steps;
            mc.seed = cfg.seed;
            return mc2d_barrier_price(cfg.model, *cfg.barrier, mc);
        }
    }
    throw ConfigError("unknown method");
}

}  // namespace

ComparisonReport run_methods(const ExperimentConfig& cfg) {
    if (cfg.methods.empty()) throw ConfigError("config requests no methods");
    if (!cfg.barrier && !cfg.vanilla) throw ConfigError("config has no contract");
    ComparisonReport report;
    for (Method m : cfg.methods) report.rows.push_back({m, run_one_method(cfg, m)});
    for (std::size_t i = 0; i < report.rows.size(); ++i)
        for (std::size_t j = i + 1; j < report.rows.size(); ++j) {
            const auto& a = report.rows[i].result;
            const auto& b = report.rows[j].result;
            report.pairs.push_back(
                {report.rows[i].method, report.rows[j].method,
                 std::abs(a.price - b.price),
                 std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error)});
        }
    return report;
}

ComparisonReport run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ComparisonReport report = run_methods(cfg);
    const double pricing_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/results.csv");
    out << "method,price,std_error,n_paths,elapsed_seconds\n";
    for (const auto& row : report.rows)
        out << method_key(row.method) << ',' << format_sig(row.result.price) << ','
            << format_sig(row.result.std_error) << ',' << row.result.n_paths << ','
            << format_sig(row.result.elapsed) << '\n';
    out.close();

    write_manifest(cfg.out_dir + "/run-manifest.txt", cfg, {{"pricing", pricing_seconds}});
    return report;
}

BenchReport bench_inner_solvers(const HestonParams& p, const BarrierContract& c,
                                const HybridConfig& cfg) {
    validate_params(p);
    std::vector<ConditionalCoefficients> coeffs(cfg.n_paths);
    std::vector<double> dts(cfg.n_paths);
    for (long i = 0; i < cfg.n_paths; ++i) {
        PathRng rng(cfg.seed, static_cast<std::uint64_t>(i), 0);
        const VariancePath path = simulate_variance_path(p, c.maturity, cfg.k_steps, rng);
        coeffs[i] = conditional_coeffs(path, p);
        dts[i] = path.dt;
    }

    // Single-threaded timed loops so per-path means are comparable.
    std::vector<double> mhp(cfg.n_paths), fdm(cfg.n_paths);
    const auto t0 = std::chrono::steady_clock::now();
    for (long i = 0; i < cfg.n_paths; ++i) mhp[i] = inner_price_mhp(p, c, coeffs[i], cfg);
    const auto t1 = std::chrono::steady_clock::now();
    for (long i = 0; i < cfg.n_paths; ++i)
        fdm[i] = inner_price_fdm(p, c, coeffs[i], dts[i], cfg);
    const auto t2 = std::chrono::steady_clock::now();

    BenchReport rep;
    rep.n_paths = cfg.n_paths;
    rep.mhp_per_path = std::chrono::duration<double>(t1 - t0).count() / cfg.n_paths;
    rep.fdm_per_path = std::chrono::duration<double>(t2 - t1).count() / cfg.n_paths;
    rep.ratio = rep.fdm_per_path / rep.mhp_per_path;
    rep.max_abs_diff = 0.0;
    for (long i = 0; i < cfg.n_paths; ++i)
        rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(mhp[i] - fdm[i]));
    return rep;
}

// ---- output helpers ----------------------------------------------------

std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_sig(row[i]) << (i + 1 < row.size() ? "," : "\n");
    }
}

namespace {

std::string canonical_config(const ExperimentConfig& cfg) {
    std::ostringstream ss;
    ss << format_sig(cfg.model.r) << '|' << format_sig(cfg.model.kappa) << '|'
       << format_sig(cfg.model.theta) << '|' << format_sig(cfg.model.epsilon) << '|'
       << format_sig(cfg.model.rho) << '|' << format_sig(cfg.model.v0) << '|'
       << format_sig(cfg.model.s0) << '|';
    if (cfg.barrier)
        ss << 'B' << static_cast<int>(cfg.barrier->payoff_kind) << '|'
           << format_sig(cfg.barrier->maturity) << '|' << format_sig(cfg.barrier->barrier) << '|'
           << format_sig(cfg.barrier->strike) << '|';
    if (cfg.vanilla)
        ss << 'V' << static_cast<int>(cfg.vanilla->kind) << '|'
           << format_sig(cfg.vanilla->maturity) << '|' << format_sig(cfg.vanilla->strike) << '|';
    for (Method m : cfg.methods) ss << method_key(m) << ';';
    ss << '|';
    for (const auto& [m, n] : cfg.n_paths) ss << method_key(m) << '=' << n << ';';
    ss << '|' << cfg.k_steps << '|' << cfg.refine << '|' << cfg.seed << '|' << cfg.fdm.m0 << '|'
       << format_sig(cfg.fdm.x_max) << '|' << cfg.fdm.time_refine;
    return ss.str();
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical serialization.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canonical_config(cfg)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, double>>& stage_seconds) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "config_hash: " << std::hex << config_hash(cfg) << std::dec << '\n';
    out << "seed: " << cfg.seed << '\n';
    out << "version: " << SVBARRIER_VERSION << '\n';
    out << "compiler: " <<
#if defined(__clang__)
        "clang " << __clang_major__ << '.' << __clang_minor__
#elif defined(__GNUC__)
        "gcc " << __GNUC__ << '.' << __GNUC_MINOR__
#else
        "unknown"
#endif
        << '\n';
    for (const auto& [stage, seconds] : stage_seconds)
        out << "stage_seconds[" << stage << "]: " << format_sig(seconds) << '\n';
}

}  // namespace svb
