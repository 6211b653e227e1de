#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "usv/adrc.hpp"
#include "usv/control.hpp"
#include "usv/disturbances.hpp"
#include "usv/errors.hpp"
#include "usv/experiment.hpp"
#include "usv/guidance.hpp"
#include "usv/vessel.hpp"

namespace py = pybind11;
using namespace usv;

namespace {

py::dict summary_dict(const experiment::MetricsSummary& s) {
  return py::module_::import("json").attr("loads")(experiment::to_json(s).dump());
}

py::dict log_columns(const experiment::RunLog& log) {
  const auto names = experiment::csv_columns();
  std::vector<py::array_t<double>> cols;
  for (std::size_t i = 0; i < names.size(); ++i) {
    cols.emplace_back(static_cast<py::ssize_t>(log.rows.size()));
  }
  for (std::size_t r = 0; r < log.rows.size(); ++r) {
    const auto values = experiment::csv_row(log.rows[r]);
    for (std::size_t i = 0; i < names.size(); ++i) cols[i].mutable_at(r) = values[i];
  }
  py::dict out;
  for (std::size_t i = 0; i < names.size(); ++i) out[py::str(names[i])] = cols[i];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ADRC/PID trajectory tracking for a twin-stern, bow-thruster USV";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  // ADRC core.
  py::class_<adrc::AdrcConfig>(m, "AdrcConfig")
      .def(py::init<>())
      .def_readwrite("beta01", &adrc::AdrcConfig::beta01)
      .def_readwrite("beta02", &adrc::AdrcConfig::beta02)
      .def_readwrite("beta03", &adrc::AdrcConfig::beta03)
      .def_readwrite("alpha1", &adrc::AdrcConfig::alpha1)
      .def_readwrite("alpha2", &adrc::AdrcConfig::alpha2)
      .def_readwrite("delta", &adrc::AdrcConfig::delta)
      .def_readwrite("b0", &adrc::AdrcConfig::b0)
      .def_readwrite("r_td", &adrc::AdrcConfig::r_td)
      .def_readwrite("r0_td", &adrc::AdrcConfig::r0_td)
      .def_readwrite("h0_td", &adrc::AdrcConfig::h0_td)
      .def_readwrite("r1", &adrc::AdrcConfig::r1)
      .def_readwrite("h1", &adrc::AdrcConfig::h1)
      .def_readwrite("c", &adrc::AdrcConfig::c)
      .def_readwrite("h", &adrc::AdrcConfig::h)
      .def_readwrite("u_min", &adrc::AdrcConfig::u_min)
      .def_readwrite("u_max", &adrc::AdrcConfig::u_max)
      .def("validate", &adrc::AdrcConfig::validate);

  py::class_<adrc::TdState>(m, "TdState")
      .def(py::init<double, double>(), py::arg("v1") = 0.0, py::arg("v2") = 0.0)
      .def_readwrite("v1", &adrc::TdState::v1)
      .def_readwrite("v2", &adrc::TdState::v2);

  py::class_<adrc::EsoState>(m, "EsoState")
      .def(py::init([](double z1, double z2, double z3) { return adrc::EsoState{z1, z2, z3, 0.0}; }),
           py::arg("z1") = 0.0, py::arg("z2") = 0.0, py::arg("z3") = 0.0)
      .def_readwrite("z1", &adrc::EsoState::z1)
      .def_readwrite("z2", &adrc::EsoState::z2)
      .def_readwrite("z3", &adrc::EsoState::z3)
      .def_readonly("e", &adrc::EsoState::e);

  m.def("fal", &adrc::fal, py::arg("e"), py::arg("alpha"), py::arg("delta"));
  m.def("fhan", &adrc::fhan, py::arg("x1"), py::arg("x2"), py::arg("r0"), py::arg("h0"));
  m.def("td_step", &adrc::td_step, py::arg("td"), py::arg("v"), py::arg("cfg"));
  m.def("eso_step",
        [](const adrc::EsoState& e, double y, double u, const adrc::AdrcConfig& c) {
          return adrc::eso_step(e, y, u, c);
        },
        py::arg("eso"), py::arg("y"), py::arg("u"), py::arg("cfg"));
  m.def("nlsef_step",
        [](const adrc::TdState& td, const adrc::EsoState& eso, const adrc::AdrcConfig& c) {
          const auto out = adrc::nlsef_step(td, eso, c);
          return py::make_tuple(out.u, out.saturated);
        },
        py::arg("td"), py::arg("eso"), py::arg("cfg"), "Returns (u, saturated).");

  py::class_<adrc::AdrcChannel>(m, "AdrcChannel")
      .def(py::init<adrc::AdrcConfig, std::string>(), py::arg("config"), py::arg("name") = "adrc")
      .def("reset", &adrc::AdrcChannel::reset, py::arg("measurement"))
      .def("step",
           [](adrc::AdrcChannel& ch, double sp, double y) {
             const auto t = ch.step(sp, y);
             py::dict d;
             d["v1"] = t.v1;
             d["v2"] = t.v2;
             d["z1"] = t.z1;
             d["z2"] = t.z2;
             d["z3"] = t.z3;
             d["u"] = t.u;
             d["saturated"] = t.saturated;
             return d;
           },
           py::arg("setpoint"), py::arg("measurement"));

  // Vessel and mixer.
  py::class_<sim::VesselParams>(m, "VesselParams")
      .def_static("defaults", &sim::VesselParams::defaults)
      .def_readwrite("mass", &sim::VesselParams::mass)
      .def_readwrite("damping_linear", &sim::VesselParams::damping_linear)
      .def_readwrite("damping_quadratic", &sim::VesselParams::damping_quadratic)
      .def_readwrite("x_bow_thruster", &sim::VesselParams::x_bow_thruster)
      .def_readwrite("y_stern_thruster", &sim::VesselParams::y_stern_thruster)
      .def_readwrite("stern_angle", &sim::VesselParams::stern_angle)
      .def_readwrite("stern_max", &sim::VesselParams::stern_max)
      .def_readwrite("bow_max", &sim::VesselParams::bow_max)
      .def_readwrite("tau_stern", &sim::VesselParams::tau_stern)
      .def_readwrite("tau_bow", &sim::VesselParams::tau_bow);

  py::class_<sim::ThrustCommand>(m, "ThrustCommand")
      .def(py::init<double, double, double>(), py::arg("stern_left") = 0.0,
           py::arg("stern_right") = 0.0, py::arg("bow") = 0.0)
      .def_readwrite("stern_left", &sim::ThrustCommand::stern_left)
      .def_readwrite("stern_right", &sim::ThrustCommand::stern_right)
      .def_readwrite("bow", &sim::ThrustCommand::bow)
      .def("__repr__", [](const sim::ThrustCommand& t) {
        return "ThrustCommand(" + std::to_string(t.stern_left) + ", " +
               std::to_string(t.stern_right) + ", " + std::to_string(t.bow) + ")";
      });

  py::class_<control::ControlDemand>(m, "ControlDemand")
      .def(py::init<double, double, double>(), py::arg("surge_force") = 0.0,
           py::arg("sway_force") = 0.0, py::arg("yaw_moment") = 0.0)
      .def_readwrite("surge_force", &control::ControlDemand::surge_force)
      .def_readwrite("sway_force", &control::ControlDemand::sway_force)
      .def_readwrite("yaw_moment", &control::ControlDemand::yaw_moment);

  m.def("mix", &control::mix, py::arg("demand"), py::arg("params"));
  m.def("allocate", &control::allocate, py::arg("demand"), py::arg("params"));
  m.def("demand_from_thrust", &control::demand_from_thrust, py::arg("thrust"), py::arg("params"));

  m.def("verify_manoeuvres",
        [](const sim::VesselParams& p) {
          py::list out;
          for (const auto& c : sim::verify_manoeuvres(p)) {
            out.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value,
                                py::arg("threshold") = c.threshold, py::arg("passed") = c.passed));
          }
          return out;
        },
        py::arg("params") = sim::VesselParams::defaults());

  // Guidance.
  py::class_<guidance::DubinsPath>(m, "DubinsPath")
      .def_property_readonly("total_length", &guidance::DubinsPath::total_length)
      .def("point_at", &guidance::DubinsPath::point_at, py::arg("s"))
      .def("heading_at", &guidance::DubinsPath::heading_at, py::arg("s"))
      .def("on_arc", &guidance::DubinsPath::on_arc, py::arg("s"))
      .def_property_readonly("segment_count",
                             [](const guidance::DubinsPath& p) { return p.segments().size(); });

  py::class_<guidance::Projection>(m, "Projection")
      .def_readonly("s", &guidance::Projection::s)
      .def_readonly("y_err", &guidance::Projection::y_err)
      .def_readonly("psi_traj", &guidance::Projection::psi_traj)
      .def_readonly("point", &guidance::Projection::point);

  m.def("build_path",
        [](const std::vector<guidance::Vec2>& wps, double radius) {
          return guidance::build_path(wps, radius);
        },
        py::arg("waypoints"), py::arg("turn_radius"));
  m.def("project",
        [](const guidance::DubinsPath& p, const guidance::Vec2& pos) { return guidance::project(p, pos); },
        py::arg("path"), py::arg("position"));
  m.def("l1_heading", &guidance::l1_heading, py::arg("path"), py::arg("position"), py::arg("s"),
        py::arg("l1_distance"));
  m.def("surge_setpoint", &guidance::surge_setpoint, py::arg("path"), py::arg("s"),
        py::arg("mission_speed"), py::arg("corner_factor"), py::arg("blend_distance"));

  // Disturbances.
  py::class_<env::WaveField>(m, "WaveField")
      .def_readonly("sea_state", &env::WaveField::sea_state)
      .def_property_readonly("amplitudes",
                             [](const env::WaveField& f) {
                               std::vector<double> v;
                               for (const auto& c : f.components) v.push_back(c.amplitude);
                               return v;
                             })
      .def_property_readonly("frequencies",
                             [](const env::WaveField& f) {
                               std::vector<double> v;
                               for (const auto& c : f.components) v.push_back(c.omega);
                               return v;
                             })
      .def_property_readonly("phases", [](const env::WaveField& f) {
        std::vector<double> v;
        for (const auto& c : f.components) v.push_back(c.phase);
        return v;
      });
  m.def("sample_pm_spectrum", &env::sample_pm_spectrum, py::arg("sea_state"),
        py::arg("n_components"), py::arg("seed"), py::arg("from_deg") = 0.0);
  m.def("wave_force",
        [](const env::WaveField& f, double t, double psi) { return env::wave_force(f, t, psi); },
        py::arg("field"), py::arg("t"), py::arg("psi"));

  // Experiments.
  py::class_<experiment::ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("name", &experiment::ScenarioConfig::name)
      .def_readwrite("repetitions", &experiment::ScenarioConfig::repetitions)
      .def_readwrite("seed", &experiment::ScenarioConfig::seed)
      .def_readwrite("timeout_s", &experiment::ScenarioConfig::timeout_s)
      .def_property(
          "condition",
          [](const experiment::ScenarioConfig& c) { return experiment::to_string(c.condition); },
          [](experiment::ScenarioConfig& c, const std::string& v) {
            c.condition = experiment::condition_from_string(v);
          })
      .def_property_readonly("controller", [](const experiment::ScenarioConfig& c) {
        return control::to_string(c.controller());
      });

  m.def("parse_scenario", &experiment::parse_scenario, py::arg("text"),
        py::arg("base_dir") = std::filesystem::path{});
  m.def("load_scenario", &experiment::load_scenario, py::arg("path"));
  m.def("csv_columns", &experiment::csv_columns);
  m.def("run_scenario",
        [](const experiment::ScenarioConfig& cfg, bool keep_logs) {
          experiment::ScenarioResult result;
          {
            py::gil_scoped_release release;
            result = experiment::run_scenario(cfg, {keep_logs, 0});
          }
          py::dict out = summary_dict(result.summary);
          if (keep_logs) {
            py::list logs;
            for (const auto& log : result.logs) logs.append(log_columns(log));
            out["logs"] = logs;
          }
          return out;
        },
        py::arg("config"), py::arg("keep_logs") = false,
        "Runs all repetitions; returns the summary as a dict, plus per-run column arrays "
        "under 'logs' when keep_logs is set.");
}
