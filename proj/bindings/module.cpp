#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "batchps/inversion.hpp"
#include "batchps/oracles.hpp"
#include "batchps/pipeline.hpp"

namespace py = pybind11;
using namespace batchps;

PYBIND11_MODULE(_batchps, m) {
    m.doc() = "Batch sojourn-time distribution in the M^[X]/M/1 "
              "processor-sharing queue: analytic transform pipeline plus "
              "differential, jump-chain and simulation oracles.";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<ComputeError>(m, "ComputeError", PyExc_RuntimeError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double rho, double q, int n_max, int b_max, double tol) {
                 ModelParams p;
                 p.rho = rho;
                 p.q = q;
                 p.n_max = n_max;
                 p.b_max = b_max;
                 p.tol = tol;
                 return p;
             }),
             py::arg("rho"), py::arg("q"), py::arg("n_max") = 200,
             py::arg("b_max") = 20, py::arg("tol") = 1e-8)
        .def_readwrite("rho", &ModelParams::rho)
        .def_readwrite("q", &ModelParams::q)
        .def_readwrite("n_max", &ModelParams::n_max)
        .def_readwrite("b_max", &ModelParams::b_max)
        .def_readwrite("tol", &ModelParams::tol)
        .def("load", &ModelParams::load);

    m.def("validate", &validate, py::arg("params"));

    py::class_<BatchDistribution>(m, "BatchDistribution")
        .def_static("geometric", &BatchDistribution::geometric, py::arg("q"))
        .def_static("explicit_pmf", &BatchDistribution::explicit_pmf,
                    py::arg("pmf"), py::arg("tol") = 1e-12)
        .def("mean", &BatchDistribution::mean)
        .def("tail", &BatchDistribution::tail);

    m.def("batch_pmf", &batch_pmf, py::arg("dist"), py::arg("b"));

    py::class_<StationaryOccupancy>(m, "StationaryOccupancy")
        .def_readonly("pi", &StationaryOccupancy::pi)
        .def_readonly("deficit", &StationaryOccupancy::deficit);
    m.def(
        "stationary_occupancy",
        [](const ModelParams& p, double tol_mass) {
            return stationary_occupancy(p, tol_mass);
        },
        py::arg("params"), py::arg("tol_mass") = 1e-10);

    py::class_<SpectralData>(m, "SpectralData")
        .def_readonly("s", &SpectralData::s)
        .def_readonly("delta", &SpectralData::delta)
        .def_readonly("u_minus", &SpectralData::u_minus)
        .def_readonly("u_plus", &SpectralData::u_plus)
        .def_readonly("c_plus", &SpectralData::c_plus)
        .def_readonly("c_minus", &SpectralData::c_minus);

    m.def("spectral_data", &spectral_data, py::arg("params"), py::arg("s"));
    m.def(
        "char_poly",
        [](const ModelParams& p, double s, Complex u) {
            return char_poly(p, s, u);
        },
        py::arg("params"), py::arg("s"), py::arg("u"));
    m.def("kernel", &kernel, py::arg("sd"), py::arg("u0"), py::arg("zeta"));
    m.def("kernel_param", &kernel_param, py::arg("sd"), py::arg("u"),
          py::arg("t"));

    m.def("moment_integral", &moment_integral, py::arg("sd"), py::arg("b"),
          py::arg("l"), py::arg("rel_tol") = 1e-11);
    m.def("rhs_integral", &rhs_integral, py::arg("sd"), py::arg("b"),
          py::arg("rel_tol") = 1e-11);
    m.def("hypergeometric_check", &hypergeometric_check, py::arg("sd"),
          py::arg("b"), py::arg("l"));

    py::class_<BoundaryCoefficients>(m, "BoundaryCoefficients")
        .def_readonly("s", &BoundaryCoefficients::s)
        .def_readonly("e", &BoundaryCoefficients::e)
        .def_readonly("residual", &BoundaryCoefficients::residual);
    m.def(
        "solve_boundary",
        [](const ModelParams& p, double s, int b_max, bool with_residual) {
            auto sd = spectral_data(p, s);
            auto table = build_moment_table(sd, b_max);
            auto bc = solve_triangular(p, table);
            if (with_residual) bc.residual = cnc0_residual(p, bc);
            return bc;
        },
        py::arg("params"), py::arg("s"), py::arg("b_max") = 20,
        py::arg("with_residual") = false);

    py::class_<TransformBuilder::Options>(m, "TransformOptions")
        .def(py::init<>())
        .def_readwrite("b_levels", &TransformBuilder::Options::b_levels)
        .def_readwrite("n_series", &TransformBuilder::Options::n_series)
        .def_readwrite("series_b_max", &TransformBuilder::Options::series_b_max)
        .def_readwrite("threads", &TransformBuilder::Options::threads);

    py::class_<TransformBuilder>(m, "TransformBuilder")
        .def(py::init<const ModelParams&, double, TransformBuilder::Options>(),
             py::arg("params"), py::arg("s"),
             py::arg("options") = TransformBuilder::Options{})
        .def("fb_star", &TransformBuilder::fb_star, py::arg("b"), py::arg("u"))
        .def("eb_star", &TransformBuilder::eb_star, py::arg("b"), py::arg("u"))
        .def("extract_coefficients", &TransformBuilder::extract_coefficients,
             py::arg("b"), py::arg("n_max"))
        .def("f_star", &TransformBuilder::f_star, py::arg("u"), py::arg("v"))
        .def("pde_residual",
             [](TransformBuilder& tb, int n_points, double h) {
                 auto r = tb.pde_residual(n_points, h);
                 return py::make_tuple(r.first_order, r.transported);
             },
             py::arg("n_points") = 25, py::arg("h") = 1e-3)
        .def_property_readonly("boundary", &TransformBuilder::boundary);

    py::class_<SurvivalPoint>(m, "SurvivalPoint")
        .def_readonly("x", &SurvivalPoint::x)
        .def_readonly("raw", &SurvivalPoint::raw)
        .def_readonly("value", &SurvivalPoint::value)
        .def_readonly("err", &SurvivalPoint::err)
        .def_readonly("bracket", &SurvivalPoint::bracket);

    py::class_<TransformFamily>(m, "TransformFamily")
        .def(py::init<const ModelParams&, int, int, TransformBuilder::Options>(),
             py::arg("params"), py::arg("n_max"), py::arg("b_max"),
             py::arg("options") = TransformBuilder::Options{})
        .def("value", &TransformFamily::value, py::arg("s"), py::arg("n"),
             py::arg("b"))
        .def("mixed", &TransformFamily::mixed, py::arg("s"));

    m.def("conditional_survival", &conditional_survival, py::arg("family"),
          py::arg("n"), py::arg("b"), py::arg("x"));
    m.def("unconditional_survival", &unconditional_survival, py::arg("family"),
          py::arg("x"));
    m.def("moment", &moment, py::arg("family"), py::arg("n"), py::arg("b"),
          py::arg("order"));
    m.def("unconditional_moment1", &unconditional_moment1, py::arg("family"));

    m.def(
        "invert",
        [](const std::function<double(double)>& f, double x) {
            auto r = invert(f, x);
            return py::make_tuple(r.value, r.err, r.oscillation);
        },
        py::arg("transform"), py::arg("x"));
    m.def("gs_invert", &gs_invert, py::arg("transform"), py::arg("x"),
          py::arg("order") = 12);

    py::class_<Bracket>(m, "Bracket")
        .def_readonly("lower", &Bracket::lower)
        .def_readonly("upper", &Bracket::upper)
        .def("mid", &Bracket::mid)
        .def("width", &Bracket::width);

    m.def("ctmc_oracle", &ctmc_oracle, py::arg("rho"), py::arg("dist"),
          py::arg("n"), py::arg("b"), py::arg("x"), py::arg("n_ctmc") = 400);

    py::class_<OdeSolution>(m, "OdeSolution")
        .def_readonly("x", &OdeSolution::x)
        .def_readonly("lower", &OdeSolution::lower)
        .def_readonly("upper", &OdeSolution::upper);
    m.def("ode_oracle", &ode_oracle, py::arg("rho"), py::arg("dist"),
          py::arg("x_grid"), py::arg("n_trunc"), py::arg("b_trunc"),
          py::arg("rel_tol") = 1e-9, py::arg("bracket_tol") = 1e-3);

    py::class_<SimulationOptions>(m, "SimulationOptions")
        .def(py::init<>())
        .def_readwrite("n_batches", &SimulationOptions::n_batches)
        .def_readwrite("replications", &SimulationOptions::replications)
        .def_readwrite("warmup_frac", &SimulationOptions::warmup_frac)
        .def_readwrite("x_grid", &SimulationOptions::x_grid)
        .def_readwrite("threads", &SimulationOptions::threads);
    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("seed", &SimulationResult::seed)
        .def_readonly("batches", &SimulationResult::batches)
        .def_readonly("mean_sojourn", &SimulationResult::mean_sojourn)
        .def_readonly("mean_se", &SimulationResult::mean_se)
        .def_readonly("x", &SimulationResult::x)
        .def_readonly("survival", &SimulationResult::survival)
        .def_readonly("survival_se", &SimulationResult::survival_se)
        .def_readonly("occupancy", &SimulationResult::occupancy)
        .def_readonly("occupancy_se", &SimulationResult::occupancy_se);
    m.def("simulate", &simulate, py::arg("rho"), py::arg("dist"),
          py::arg("seed"), py::arg("options"));

    py::class_<TransientResult>(m, "TransientResult")
        .def_readonly("mean", &TransientResult::mean)
        .def_readonly("se", &TransientResult::se)
        .def_readonly("count", &TransientResult::count)
        .def_readonly("x", &TransientResult::x)
        .def_readonly("survival", &TransientResult::survival)
        .def_readonly("survival_se", &TransientResult::survival_se);
    m.def("simulate_transient", &simulate_transient, py::arg("rho"),
          py::arg("dist"), py::arg("n0"), py::arg("b0"), py::arg("trials"),
          py::arg("seed"), py::arg("x_grid") = std::vector<double>{},
          py::arg("threads") = 1);
}
