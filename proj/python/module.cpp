#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svbarrier/engine.hpp"
#include "svbarrier/heat_potentials.hpp"
#include "svbarrier/mcs2d.hpp"
#include "svbarrier/minpdf.hpp"
#include "svbarrier/vanilla_analytic.hpp"
#include "svbarrier/willard.hpp"

namespace py = pybind11;
using namespace svb;

namespace {

HestonParams make_params(double r, double kappa, double theta, double epsilon, double rho,
                         double v0, double s0) {
    HestonParams p{r, kappa, theta, epsilon, rho, v0, s0};
    validate_params(p);
    return p;
}

py::dict result_dict(const PricingResult& res) {
    py::dict d;
    d["price"] = res.price;
    d["std_error"] = res.std_error;
    d["n_paths"] = res.n_paths;
    d["elapsed"] = res.elapsed;
    d["method"] = method_name(res.method);
    return d;
}

}  // namespace

PYBIND11_MODULE(svbarrier, m) {
    m.doc() = "barrier options under stochastic variance: hybrid heat-potential pricer";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<HestonParams>(m, "HestonParams")
        .def(py::init(&make_params), py::arg("r"), py::arg("kappa"), py::arg("theta"),
             py::arg("epsilon"), py::arg("rho"), py::arg("v0"), py::arg("s0") = 1.0)
        .def_readonly("r", &HestonParams::r)
        .def_readonly("kappa", &HestonParams::kappa)
        .def_readonly("theta", &HestonParams::theta)
        .def_readonly("epsilon", &HestonParams::epsilon)
        .def_readonly("rho", &HestonParams::rho)
        .def_readonly("v0", &HestonParams::v0)
        .def_readonly("s0", &HestonParams::s0);

    m.def("bs_call", &bs_call, py::arg("s0"), py::arg("strike"), py::arg("maturity"),
          py::arg("r"), py::arg("sigma"));
    m.def("bs_put", &bs_put, py::arg("s0"), py::arg("strike"), py::arg("maturity"), py::arg("r"),
          py::arg("sigma"));
    m.def("implied_vol", &implied_vol, py::arg("price"), py::arg("s0"), py::arg("strike"),
          py::arg("maturity"), py::arg("r"));
    m.def(
        "vanilla_call",
        [](const HestonParams& p, double strike, double maturity) {
            return lewis_lipton_call(p, strike, maturity);
        },
        py::arg("params"), py::arg("strike"), py::arg("maturity"),
        "semi-closed-form call price under the stochastic variance model");

    m.def(
        "vanilla_call_mc",
        [](const HestonParams& p, double strike, double maturity, long n_paths,
           std::uint64_t seed, int k_steps) {
            const VanillaContract c = make_vanilla_contract(OptionKind::Call, maturity, strike);
            return result_dict(willard_mc_price(p, c, n_paths, seed, k_steps));
        },
        py::arg("params"), py::arg("strike"), py::arg("maturity"), py::arg("n_paths") = 100000,
        py::arg("seed") = 1, py::arg("k_steps") = 52,
        "conditional Monte Carlo vanilla call price");

    m.def(
        "barrier_price",
        [](const HestonParams& p, const std::string& payoff, double barrier, double strike,
           double maturity, const std::string& method, long n_paths, std::uint64_t seed,
           int k_steps, int refine) {
            PayoffKind kind;
            if (payoff == "no_touch") kind = PayoffKind::NoTouch;
            else if (payoff == "down_out_call") kind = PayoffKind::DownOutCall;
            else if (payoff == "down_out_put") kind = PayoffKind::DownOutPut;
            else throw ConfigError("unknown payoff '" + payoff + "'");
            const BarrierContract c = make_barrier_contract(kind, maturity, barrier, strike, p.s0);
            if (method == "mcs2d") {
                Mcs2dConfig mc;
                mc.n_paths = n_paths;
                mc.k_steps = k_steps;
                mc.seed = seed;
                return result_dict(mc2d_barrier_price(p, c, mc));
            }
            Method inner;
            if (method == "hybrid_mhp") inner = Method::HybridMHP;
            else if (method == "hybrid_fdm") inner = Method::HybridFDM;
            else throw ConfigError("unknown method '" + method + "'");
            HybridConfig hc;
            hc.n_paths = n_paths;
            hc.k_steps = k_steps;
            hc.refine = refine;
            hc.seed = seed;
            return result_dict(price_barrier_hybrid(p, c, inner, hc));
        },
        py::arg("params"), py::arg("payoff"), py::arg("barrier"), py::arg("strike") = 0.0,
        py::arg("maturity") = 1.0, py::arg("method") = "hybrid_mhp", py::arg("n_paths") = 10000,
        py::arg("seed") = 1, py::arg("k_steps") = 52, py::arg("refine") = 4,
        "lower-barrier option price by the hybrid or full 2D Monte Carlo engines");

    m.def(
        "averaged_green",
        [](const HestonParams& p, double barrier, double maturity, const std::string& method,
           long n_paths, std::uint64_t seed, int k_steps, int refine) {
            Method inner;
            if (method == "hybrid_mhp") inner = Method::HybridMHP;
            else if (method == "hybrid_fdm") inner = Method::HybridFDM;
            else throw ConfigError("unknown method '" + method + "'");
            HybridConfig hc;
            hc.n_paths = n_paths;
            hc.k_steps = k_steps;
            hc.refine = refine;
            hc.seed = seed;
            const AveragedGreen g = svb::averaged_green(p, std::log(barrier / p.s0), maturity,
                                                        inner, hc);
            return py::make_tuple(g.x, g.density);
        },
        py::arg("params"), py::arg("barrier"), py::arg("maturity") = 1.0,
        py::arg("method") = "hybrid_mhp", py::arg("n_paths") = 1000, py::arg("seed") = 1,
        py::arg("k_steps") = 52, py::arg("refine") = 4,
        "(x, density) of the path-averaged barrier Green's function");

    m.def("joint_min_pdf", &joint_pdf_drifted, py::arg("maturity"), py::arg("a"), py::arg("b"),
          py::arg("drift") = 0.0,
          "closed-form joint density of (minimum, terminal) for constant drift");
    m.def("constant_drift_green", &constant_drift_green, py::arg("maturity"), py::arg("x"),
          py::arg("barrier"), py::arg("drift"));
}
