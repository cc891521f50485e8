#include "nuqutrit/calibration.hpp"
#include "nuqutrit/decomposition.hpp"
#include "nuqutrit/io.hpp"
#include "nuqutrit/phase_advance.hpp"
#include "nuqutrit/pmns.hpp"
#include "nuqutrit/runner.hpp"
#include "nuqutrit/vm.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nuqutrit;

namespace {

io::json parse(const std::string& s) { return s.empty() ? io::json::object() : io::json::parse(s); }

Flavor flavor_arg(const std::string& s) { return parse_flavor(s); }

py::dict table_to_dict(const ResultTable& t) {
    std::vector<std::size_t> curve, point;
    std::vector<int> repeat;
    std::vector<double> x;
    std::vector<std::array<std::uint64_t, 3>> counts;
    std::vector<std::array<double, 3>> probs;
    for (const auto& r : t.rows) {
        curve.push_back(r.curve);
        point.push_back(r.point);
        repeat.push_back(r.repeat);
        x.push_back(r.x);
        counts.push_back(r.counts.n);
        probs.push_back({r.probabilities(0), r.probabilities(1), r.probabilities(2)});
    }
    py::list curves;
    for (const auto& c : t.curves)
        curves.append(py::dict(py::arg("initial") = std::string(flavor_name(c.initial)), py::arg("vm") = c.vm,
                               py::arg("delta") = c.delta));
    return py::dict(py::arg("curves") = curves, py::arg("grid") = t.grid, py::arg("curve") = curve,
                    py::arg("point") = point, py::arg("repeat") = repeat, py::arg("x") = x, py::arg("counts") = counts,
                    py::arg("probabilities") = probs, py::arg("failed") = t.failed, py::arg("failure") = t.failure,
                    py::arg("counts_digest") = io::counts_digest(t),
                    py::arg("manifest") = io::manifest(t).dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Neutrino oscillations on a simulated transmon qutrit";

    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<OscillationParams>(m, "OscillationParams")
        .def(py::init<>())
        .def_static("nufit51", &OscillationParams::nufit51)
        .def_static("from_json", [](const std::string& s) { return io::params_from_json(parse(s)); })
        .def_readwrite("theta12", &OscillationParams::theta12)
        .def_readwrite("theta23", &OscillationParams::theta23)
        .def_readwrite("theta13", &OscillationParams::theta13)
        .def_readwrite("delta", &OscillationParams::delta)
        .def_readwrite("dm2_21", &OscillationParams::dm2_21)
        .def_readwrite("dm2_31", &OscillationParams::dm2_31);

    py::class_<GivensGate>(m, "GivensGate")
        .def_property_readonly("subspace", [](const GivensGate& g) { return std::string(subspace_name(g.subspace)); })
        .def_readonly("phi", &GivensGate::phi)
        .def_readonly("theta", &GivensGate::theta)
        .def("matrix", &givens_matrix)
        .def("__repr__", [](const GivensGate& g) {
            return "GivensGate(" + std::string(subspace_name(g.subspace)) + ", phi=" + std::to_string(g.phi) +
                   ", theta=" + std::to_string(g.theta) + ")";
        });

    m.def("pmns_matrix", &build_pmns, py::arg("params"));
    m.def(
        "oscillation_matrix",
        [](const OscillationParams& p, double vm, double L_km, double E_GeV) {
            return oscillation_matrix(p, vm, Baseline{L_km, E_GeV});
        },
        py::arg("params"), py::arg("vm"), py::arg("L_km"), py::arg("E_GeV"),
        "M[beta, alpha] = P(alpha -> beta); DMP effective parameters when vm > 0.");
    m.def(
        "exact_matter_matrix",
        [](const OscillationParams& p, double vm, double L_km, double E_GeV) {
            return exact_matter_matrix(p, vm, Baseline{L_km, E_GeV});
        },
        py::arg("params"), py::arg("vm"), py::arg("L_km"), py::arg("E_GeV"));
    m.def(
        "compile_circuit",
        [](const OscillationParams& p, const std::string& scenario, double vm, double L_km, double E_GeV) {
            return compile_circuit(p, parse_scenario(scenario), vm, Baseline{L_km, E_GeV}).gates;
        },
        py::arg("params"), py::arg("scenario"), py::arg("vm"), py::arg("L_km"), py::arg("E_GeV"),
        "Gates in application order.");
    m.def(
        "run_circuit",
        [](const std::vector<GivensGate>& gates, const std::string& initial) {
            return Vector3r(probabilities(apply_sequence(QutritState::flavor(flavor_arg(initial)), gates)));
        },
        py::arg("gates"), py::arg("initial"));
    m.def(
        "sample_counts",
        [](const Vector3r& p, std::uint64_t shots, std::uint64_t seed) { return sample_counts(p, shots, seed).n; },
        py::arg("probabilities"), py::arg("shots"), py::arg("seed"));
    m.def(
        "mitigate",
        [](const Vector3r& f, const Matrix3r& a) {
            ConfusionMatrix c;
            c.a = a;
            c.validate();
            return Vector3r(mitigate(f, c).probabilities);
        },
        py::arg("frequencies"), py::arg("confusion"));
    m.def("reference_confusion", [] { return Matrix3r(ConfusionMatrix::reference().a); });
    m.def(
        "verify_decomposition",
        [](const OscillationParams& p, const std::string& scenario, double vm) {
            return verify_decomposition(build_pmns(p), decompose(p, parse_scenario(scenario), vm).r);
        },
        py::arg("params"), py::arg("scenario") = "cp", py::arg("vm") = 0.0);

    m.def(
        "default_config", [](const std::string& scenario) { return io::config_to_json(ScenarioConfig::defaults(parse_scenario(scenario))).dump(); },
        py::arg("scenario"), "Default scenario configuration as a JSON string.");
    m.def(
        "run_scenario",
        [](const std::string& config_json) {
            const ResultTable t = [&] {
                py::gil_scoped_release release;
                return run_scenario(io::config_from_json(parse(config_json)));
            }();
            return table_to_dict(t);
        },
        py::arg("config_json"), "Runs a scenario; the JSON keys mirror the CLI config file.");
    m.def(
        "score",
        [](const std::string& config_json) {
            ScoreReport rep;
            ResultTable t;
            {
                py::gil_scoped_release release;
                const ScenarioConfig c = io::config_from_json(parse(config_json));
                t = run_scenario(c);
                rep = score(t, analytic_reference(c));
            }
            return io::score_to_json(rep, t).dump();
        },
        py::arg("config_json"), "Runs a scenario and returns its score report as JSON.");
    m.def("r2_score", &r2_score, py::arg("y"), py::arg("y0"));
    m.def(
        "calibrate",
        [](const std::string& device_json, std::uint64_t shots, std::uint64_t seed) {
            CalibrationOptions o;
            o.shots = shots;
            o.seed = seed;
            CalibrationReport r;
            {
                py::gil_scoped_release release;
                r = calibrate(io::device_from_json(parse(device_json)), o);
            }
            return io::calibration_report_to_json(r).dump();
        },
        py::arg("device_json") = "", py::arg("shots") = 8192, py::arg("seed") = 2023,
        "Full calibration of the mock transmon; returns the report as JSON.");
    m.attr("__version__") = io::kVersion;
}
