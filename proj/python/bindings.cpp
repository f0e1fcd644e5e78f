#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satd/scenario.hpp"

namespace py = pybind11;
using namespace satd;

namespace {

// Scenarios and reports cross the boundary as JSON text; the Python side turns them into dicts.
Scenario scenario_of(const std::string& text) { return parse_scenario(nlohmann::json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_satd, m) {
    m.doc() = "SATD tripod-gate synthesis and simulation core";

    // Translators run newest first, so the base class goes in before its subclasses.
    py::register_exception<Error>(m, "SatdError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);

    py::class_<CircuitSpec>(m, "CircuitSpec")
        .def(py::init<>())
        .def(py::init([](double e_c, double e_j, double e_l, double flux) {
                 CircuitSpec c{e_c, e_j, e_l, flux};
                 c.validate();
                 return c;
             }),
             py::arg("e_c_ghz"), py::arg("e_j_ghz"), py::arg("e_l_ghz"), py::arg("flux_phi0"))
        .def_readwrite("e_c_ghz", &CircuitSpec::e_c_ghz)
        .def_readwrite("e_j_ghz", &CircuitSpec::e_j_ghz)
        .def_readwrite("e_l_ghz", &CircuitSpec::e_l_ghz)
        .def_readwrite("flux_phi0", &CircuitSpec::flux_phi0);

    py::class_<SpectrumData>(m, "Spectrum")
        .def_readonly("levels", &SpectrumData::levels)
        .def_readonly("basis_size", &SpectrumData::basis_size)
        .def_readonly("energies", &SpectrumData::energies, "rad/ns, ascending")
        .def_readonly("charge_elems", &SpectrumData::charge_elems)
        .def_readonly("phase_elems", &SpectrumData::phase_elems)
        .def_readonly("convergence_residual", &SpectrumData::convergence_residual);

    m.def("diagonalize", py::overload_cast<const CircuitSpec&, int, int>(&diagonalize), py::arg("spec"),
          py::arg("basis_size") = 300, py::arg("levels") = 18, py::call_guard<py::gil_scoped_release>());
    m.def("flux_dispersions", &flux_dispersions, py::arg("spec"), py::arg("basis_size") = 300,
          py::arg("levels") = 18, py::arg("delta_flux") = 1e-5);

    m.def("omega_rms", &omega_rms, py::arg("t_g"), py::arg("omega0"));
    m.def(
        "optimize_omega0",
        [](double t_g) {
            const OmegaOptimum o = optimize_omega0(t_g);
            return py::dict(py::arg("omega0") = o.omega0, py::arg("omega_rms") = o.omega_rms,
                            py::arg("omega0_scaled") = o.scaled_omega0, py::arg("omega_rms_scaled") = o.scaled_rms);
        },
        py::arg("t_g"));
    m.def(
        "target_unitary", [](double a, double b, double g) { return Eigen::Matrix2cd(target_unitary(a, b, g).u_g01); },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma0"));

    m.def(
        "normalize_scenario", [](const std::string& text) { return to_json(scenario_of(text)).dump(); },
        py::arg("scenario_json"), "Validate a scenario and return it with every default filled in.");
    m.def(
        "simulate",
        [](const std::string& text, int workers) {
            const Scenario s = scenario_of(text);
            py::gil_scoped_release release;
            return to_json(simulate(s, workers)).dump();
        },
        py::arg("scenario_json"), py::arg("workers") = 1);
    m.def(
        "run",
        [](const std::string& sub, const std::string& text, int workers, const std::string& extra) {
            const Scenario s = scenario_of(text);
            const auto ex = extra.empty() ? nlohmann::json::object() : nlohmann::json::parse(extra);
            py::gil_scoped_release release;
            return run(sub, s, workers, ex);
        },
        py::arg("subcommand"), py::arg("scenario_json"), py::arg("workers") = 1, py::arg("extra_json") = "");
    m.attr("report_schema") = report_schema;
}
