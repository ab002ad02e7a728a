#include <cmath>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xdamp/coefficients.hpp"
#include "xdamp/config.hpp"
#include "xdamp/detection.hpp"
#include "xdamp/fitting.hpp"
#include "xdamp/hydrogen.hpp"
#include "xdamp/spectra.hpp"
#include "xdamp/validate.hpp"
#include "xdamp/wigner.hpp"

namespace py = pybind11;
using namespace xdamp;

namespace {

HalfInt to_half(double v) {
  const double twice = 2.0 * v;
  if (std::fabs(twice - std::round(twice)) > 1e-9) throw py::value_error("not a multiple of 1/2");
  return HalfInt::from_twice(static_cast<int>(std::lround(twice)));
}

std::vector<std::string> state_labels(const LevelScheme& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (const auto& st : s.states) out.push_back(st.label());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cross damping in the hydrogen 2S-4P line shape";

  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
  py::register_exception<FitError>(m, "FitError", PyExc_RuntimeError);
  // ConfigError carries the offending field path
  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::object err = py::reinterpret_borrow<py::object>(config_error.ptr())(e.what());
      py::setattr(err, "field", py::str(e.path));
      PyErr_SetObject(config_error.ptr(), err.ptr());
    }
  });

  m.def("wigner3j", [](double j1, double j2, double j3, double m1, double m2, double m3) {
    return wigner3j(to_half(j1), to_half(j2), to_half(j3), to_half(m1), to_half(m2), to_half(m3));
  });
  m.def("clebsch_gordan", [](double j1, double m1, double j2, double m2, double j, double mj) {
    return clebsch_gordan(to_half(j1), to_half(m1), to_half(j2), to_half(m2), to_half(j), to_half(mj));
  });
  m.def("fc", &fc, py::arg("delta_omega"), py::arg("tau_c"));
  m.def("thermal_n", &thermal_n, py::arg("omega"), py::arg("temperature"));

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init(&default_run_config))
      .def_static(
          "from_json",
          [](const std::string& text) {
            RunConfig c = parse_run_config(text);
            c.validate();
            return c;
          },
          py::arg("text"))
      .def_static(
          "load",
          [](const std::string& path) {
            RunConfig c = load_run_config(path);
            c.validate();
            return c;
          },
          py::arg("path"))
      .def("to_json", &serialize_run_config)
      .def("validate", &RunConfig::validate)
      .def_property_readonly("regions", [](const RunConfig& c) { return c.regions; })
      .def_property(
          "tau_c", [](const RunConfig& c) { return c.coarse_grain.tau_c; },
          [](RunConfig& c, double v) { c.coarse_grain.tau_c = v; })
      .def_property(
          "rabi_scale", [](const RunConfig& c) { return c.drive.rabi_scale; },
          [](RunConfig& c, double v) { c.drive.rabi_scale = v; })
      .def_property(
          "cross_damping", [](const RunConfig& c) { return c.toggles.cross_damping; },
          [](RunConfig& c, bool v) { c.toggles.cross_damping = v; })
      .def_property(
          "threads", [](const RunConfig& c) { return c.threads; }, [](RunConfig& c, unsigned v) { c.threads = v; });

  py::class_<LevelScheme>(m, "LevelScheme")
      .def(py::init([](const RunConfig& c) { return build_level_scheme(c.model); }),
           py::arg_v("config", default_run_config(), "RunConfig()"))
      .def("__len__", &LevelScheme::size)
      .def_readonly("gamma_tot", &LevelScheme::gamma_tot)
      .def_readonly("driven_ground", &LevelScheme::driven_ground)
      .def_readonly("reference_upper", &LevelScheme::reference_upper)
      .def_readonly("second_upper", &LevelScheme::second_upper)
      .def_property_readonly("labels", &state_labels)
      .def_property_readonly("transition_count", [](const LevelScheme& s) { return s.transitions.size(); })
      .def("peak_splitting", &LevelScheme::peak_splitting)
      .def("linewidth_hz", [](const LevelScheme& s) { return linewidth_hz(s); })
      .def("detuning_grid", [](const LevelScheme& s, const RunConfig& c) { return c.detuning_grid(s); });

  m.def(
      "gamma_matrix",
      [](const LevelScheme& s, const RunConfig& c, bool cross_damping) {
        return build_gamma_matrix(s, c.coarse_grain, cross_damping).values;
      },
      py::arg("scheme"), py::arg("config"), py::arg("cross_damping") = true,
      "gamma_ij over all transitions [rad/s]");

  py::class_<DetectionRegion>(m, "DetectionRegion")
      .def_static("full", &DetectionRegion::full)
      .def_static("cone_about_y", &DetectionRegion::cone_about_y, py::arg("theta"))
      .def_static("cone_about_y_solid_angle", &DetectionRegion::cone_about_y_solid_angle, py::arg("omega"))
      .def_static("double_cone_z", &DetectionRegion::double_cone_z, py::arg("theta"))
      .def_static("inverted_double_cone_z", &DetectionRegion::inverted_double_cone_z, py::arg("theta"))
      .def_static("stripe", &DetectionRegion::stripe, py::arg("theta"), py::arg("width") = 0.01)
      .def_property_readonly("kind", [](const DetectionRegion& r) { return to_string(r.kind); })
      .def_readonly("theta", &DetectionRegion::theta)
      .def_readonly("width", &DetectionRegion::width)
      .def("solid_angle", &DetectionRegion::solid_angle)
      .def("matrix", [](const DetectionRegion& r) { return detection_matrix(r); })
      .def("__repr__", &DetectionRegion::describe)
      .def(py::self == py::self);

  py::class_<Spectrum>(m, "Spectrum")
      .def_property_readonly("detunings_hz", &Spectrum::detunings_hz)
      .def_readonly("rates", &Spectrum::rates)
      .def_readonly("region", &Spectrum::region)
      .def_readonly("tau_c", &Spectrum::tau_c)
      .def_property_readonly("cross_damping", [](const Spectrum& s) { return s.toggles.cross_damping; });

  m.def(
      "spectrum",
      [](const LevelScheme& s, const RunConfig& c, const DetectionRegion& region, bool cross_damping) {
        c.validate();
        Toggles t = c.toggles;
        t.cross_damping = cross_damping;
        const auto grid = c.detuning_grid(s);
        py::gil_scoped_release release;
        return sweep_spectrum(s, c.sweep_settings(), region, t, grid);
      },
      py::arg("scheme"), py::arg("config"), py::arg("region"), py::arg("cross_damping") = true);

  py::class_<DoubleLorentzianFit>(m, "DoubleLorentzianFit")
      .def_readonly("x1", &DoubleLorentzianFit::x1)
      .def_readonly("x2", &DoubleLorentzianFit::x2)
      .def_readonly("b1", &DoubleLorentzianFit::b1)
      .def_readonly("b2", &DoubleLorentzianFit::b2)
      .def_readonly("a1", &DoubleLorentzianFit::a1)
      .def_readonly("a2", &DoubleLorentzianFit::a2)
      .def_readonly("omega0", &DoubleLorentzianFit::omega0)
      .def_readonly("residual_norm", &DoubleLorentzianFit::residual_norm)
      .def_readonly("converged", &DoubleLorentzianFit::converged)
      .def("__call__", &DoubleLorentzianFit::operator(), py::arg("x_hz"));
  m.def("fit_double_lorentzian",
        py::overload_cast<const std::vector<double>&, const std::vector<double>&, double>(&fit_double_lorentzian),
        py::arg("x_hz"), py::arg("y"), py::arg("omega0_hz"));

  py::class_<LinePullingResult>(m, "LinePullingResult")
      .def_readonly("p12", &LinePullingResult::pulling_p12)
      .def_readonly("p32", &LinePullingResult::pulling_p32)
      .def_readonly("residual", &LinePullingResult::residual)
      .def_property_readonly("definition", [](const LinePullingResult& r) { return to_string(r.definition); })
      .def("__repr__", [](const LinePullingResult& r) {
        return "<LinePullingResult " + to_string(r.definition) + " p12=" + std::to_string(r.pulling_p12) +
               " Hz p32=" + std::to_string(r.pulling_p32) + " Hz>";
      });

  m.def("line_pulling", &line_pulling, py::arg("cross_on"), py::arg("cross_off"), py::arg("omega0_hz"));
  m.def(
      "jentschura_pulling",
      [](const Spectrum& on, const Spectrum& off, double omega0_hz, double window_hz, bool half_max) {
        return jentschura_pulling(on, off, omega0_hz, window_hz,
                                  half_max ? PullingDefinition::JentschuraHalfMax : PullingDefinition::JentschuraMax);
      },
      py::arg("cross_on"), py::arg("cross_off"), py::arg("omega0_hz"), py::arg("window_hz"),
      py::arg("half_max") = true);

  m.def(
      "validate",
      [](const RunConfig& c) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_validation(c);
        }
        for (const auto& r : results) out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("config"), "Invariant suite as (name, passed, detail) tuples");
}
