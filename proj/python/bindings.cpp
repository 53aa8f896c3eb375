#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlosim/harness.hpp"

namespace py = pybind11;
using namespace nlosim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Simulated indoor NLoS backscatter-tag localization pipeline";

  py::enum_<Modulation>(m, "Modulation")
      .value("HFD", Modulation::kHfd)
      .value("DSSS_ONLY", Modulation::kDsssOnly)
      .value("FSK", Modulation::kFsk);
  py::enum_<Estimator>(m, "Estimator")
      .value("FS_MUSIC", Estimator::kFsMusic)
      .value("MUSIC", Estimator::kMusic);

  py::class_<Point2D>(m, "Point2D")
      .def(py::init([](double x, double y) { return Point2D{x, y}; }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2D::x)
      .def_readwrite("y", &Point2D::y)
      .def("__repr__", [](const Point2D& p) {
        return "Point2D(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
      });

  py::class_<FmcwConfig>(m, "FmcwConfig")
      .def(py::init<>())
      .def_readwrite("carrier_hz", &FmcwConfig::carrier_hz)
      .def_readwrite("bandwidth_hz", &FmcwConfig::bandwidth_hz)
      .def_readwrite("chirp_t_s", &FmcwConfig::chirp_t_s)
      .def_readwrite("chirps_per_frame", &FmcwConfig::chirps_per_frame)
      .def_readwrite("sample_rate_hz", &FmcwConfig::sample_rate_hz)
      .def("slope", &FmcwConfig::slope)
      .def("wavelength", &FmcwConfig::wavelength);

  py::class_<ArrayConfig>(m, "ArrayConfig")
      .def(py::init<>())
      .def_readwrite("n_elements", &ArrayConfig::n_elements)
      .def_readwrite("spacing_m", &ArrayConfig::spacing_m);

  py::class_<MethodSpec>(m, "MethodSpec")
      .def(py::init<>())
      .def_readwrite("modulation", &MethodSpec::modulation)
      .def_readwrite("estimator", &MethodSpec::estimator);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("fmcw", &ScenarioConfig::fmcw)
      .def_readwrite("array", &ScenarioConfig::array)
      .def_readwrite("method", &ScenarioConfig::method)
      .def_readwrite("snr_db", &ScenarioConfig::snr_db)
      .def_readwrite("trials", &ScenarioConfig::trials)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("repetitions", &ScenarioConfig::repetitions);

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("trial", &TrialRecord::trial)
      .def_readonly("target_id", &TrialRecord::target_id)
      .def_readonly("truth_x", &TrialRecord::truth_x)
      .def_readonly("truth_y", &TrialRecord::truth_y)
      .def_readonly("est_x", &TrialRecord::est_x)
      .def_readonly("est_y", &TrialRecord::est_y)
      .def_readonly("err_euclid_cm", &TrialRecord::err_euclid_cm)
      .def_readonly("anchors_used", &TrialRecord::anchors_used)
      .def_readonly("converged", &TrialRecord::converged)
      .def_property_readonly(
          "verdict", [](const TrialRecord& r) { return to_string(r.verdict); });

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("trials", &ScenarioResult::trials)
      .def_readonly("median_err_cm", &ScenarioResult::median_err_cm)
      .def_readonly("mean_err_cm", &ScenarioResult::mean_err_cm);

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("median_err_cm", &SweepPoint::median_err_cm)
      .def_readonly("mean_err_cm", &SweepPoint::mean_err_cm)
      .def_readonly("trials", &SweepPoint::trials);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("axis", &SweepResult::axis)
      .def_readonly("points", &SweepResult::points)
      .def_readonly("trend_nondecreasing", &SweepResult::trend_nondecreasing);

  py::class_<CompareEntry>(m, "CompareEntry")
      .def_readonly("median_err_cm", &CompareEntry::median_err_cm)
      .def_readonly("mean_err_cm", &CompareEntry::mean_err_cm)
      .def_property_readonly("method", [](const CompareEntry& e) {
        return to_string(e.method.modulation) + "+" + to_string(e.method.estimator);
      });

  py::class_<CompareResult>(m, "CompareResult")
      .def_readonly("entries", &CompareResult::entries);

  m.def("parse_config", &parse_config_json, py::arg("json_text"),
        "Parse a scenario config from a JSON string");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("run_scenario", &run_scenario, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_trial",
      [](const ScenarioConfig& cfg, int trial, const std::string& target_id) {
        return run_trial(cfg, trial, target_id);
      },
      py::arg("config"), py::arg("trial"), py::arg("target_id"),
      py::call_guard<py::gil_scoped_release>());
  m.def("sweep", &sweep, py::arg("config"), py::arg("axis"), py::arg("values"),
        py::call_guard<py::gil_scoped_release>());
  m.def("compare_report", &compare_report, py::arg("config"),
        py::arg("methods"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "trials_to_csv",
      [](const std::vector<TrialRecord>& trials) {
        return trials_to_csv(trials);
      },
      py::arg("trials"));

  m.def(
      "generate_code",
      [](std::uint64_t family_seed, int length) {
        return generate_dsss_code(family_seed, length).chips;
      },
      py::arg("family_seed"), py::arg("length"));
  m.def(
      "correlation_profile",
      [](std::vector<int> a, std::vector<int> b) {
        DsssCode ca, cb;
        ca.chips = std::move(a);
        cb.chips = std::move(b);
        return correlation_profile(ca, cb);
      },
      py::arg("a"), py::arg("b"));
  m.def("beat_frequency", &beat_frequency, py::arg("fmcw"),
        py::arg("one_way_distance_m"));
  m.def(
      "virtual_target_position",
      [](const Point2D& radar, const Point2D& p_s, double d_rs, double d_total) {
        const Point2D v = virtual_target_position(radar, p_s, d_rs, d_total);
        return py::make_tuple(v.x, v.y);
      },
      py::arg("radar"), py::arg("p_s"), py::arg("d_rs"), py::arg("d_total"));
  m.def(
      "wls_multilaterate",
      [](const std::vector<std::tuple<double, double, double, double>>& rows) {
        std::vector<Anchor> anchors;
        for (const auto& [x, y, d, w] : rows) anchors.push_back({{x, y}, d, w});
        const LocalizationEstimate est = wls_multilaterate(anchors);
        return py::make_tuple(est.position.x, est.position.y, est.residual,
                              est.converged);
      },
      py::arg("anchors"),
      "anchors: list of (x, y, distance, weight); returns (x, y, residual, "
      "converged)");
}
