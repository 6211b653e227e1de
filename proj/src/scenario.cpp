// Scenario file parsing. Format: INI-style sections of `key = value` lines,
// '#' or ';' comments. Vector values are whitespace-separated numbers.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "usv/angles.hpp"
#include "usv/errors.hpp"
#include "usv/experiment.hpp"

namespace usv::experiment {
namespace {

using Setter = std::function<void(const std::string&)>;
using Section = std::map<std::string, Setter>;

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  double v = 0.0;
  std::string rest;
  if (!(in >> v) || (in >> rest)) throw ConfigError("'" + key + "': expected a number, got '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  long long v = 0;
  std::string rest;
  if (!(in >> v) || (in >> rest)) throw ConfigError("'" + key + "': expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("'" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<double> parse_vector(const std::string& key, const std::string& text, std::size_t n) {
  std::istringstream in(text);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != n) {
    throw ConfigError("'" + key + "': expected " + std::to_string(n) + " numbers, got '" + text + "'");
  }
  return out;
}

Setter number(double& target) {
  return [&target](const std::string& v) { target = parse_double("value", v); };
}

Section adrc_section(adrc::AdrcConfig& a) {
  return {{"beta01", number(a.beta01)}, {"beta02", number(a.beta02)}, {"beta03", number(a.beta03)},
          {"alpha1", number(a.alpha1)}, {"alpha2", number(a.alpha2)}, {"delta", number(a.delta)},
          {"b0", number(a.b0)},         {"r_td", number(a.r_td)},     {"r0_td", number(a.r0_td)},
          {"h0_td", number(a.h0_td)},   {"r1", number(a.r1)},         {"h1", number(a.h1)},
          {"c", number(a.c)},           {"u_min", number(a.u_min)},   {"u_max", number(a.u_max)}};
}

Section pid_section(control::PidGains& g) {
  return {{"kp", number(g.kp)},
          {"ki", number(g.ki)},
          {"kd", number(g.kd)},
          {"integrator_limit", number(g.integrator_limit)},
          {"u_min", number(g.u_min)},
          {"u_max", number(g.u_max)}};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("scenario file: ") + e.what());
  }

  ScenarioConfig cfg;
  std::optional<double> current_speed;
  std::optional<int> sea_state;
  std::optional<double> control_h;
  std::string waypoint_text;

  std::map<std::string, Section> sections;
  sections["scenario"] = {
      {"name", [&](const std::string& v) { cfg.name = v; }},
      {"controller",
       [&](const std::string& v) { cfg.control.mode = control::controller_mode_from_string(v); }},
      {"condition", [&](const std::string& v) { cfg.condition = condition_from_string(v); }},
      {"waypoints", [&](const std::string& v) { waypoint_text = v; }},
      {"repetitions",
       [&](const std::string& v) { cfg.repetitions = static_cast<int>(parse_int("repetitions", v)); }},
      {"seed",
       [&](const std::string& v) {
         const long long s = parse_int("seed", v);
         if (s < 0) throw ConfigError("'seed' must be >= 0");
         cfg.seed = static_cast<std::uint64_t>(s);
       }},
      {"timeout_s", number(cfg.timeout_s)},
      {"sim_dt", number(cfg.sim_dt)},
      {"control_decimation",
       [&](const std::string& v) {
         cfg.control_decimation = static_cast<int>(parse_int("control_decimation", v));
       }},
  };
  sections["environment"] = {
      {"current_speed_mps", [&](const std::string& v) { current_speed = parse_double("current_speed_mps", v); }},
      {"current_dir_deg", number(cfg.current_dir_deg)},
      {"sea_state", [&](const std::string& v) { sea_state = static_cast<int>(parse_int("sea_state", v)); }},
      {"wave_dir_deg", number(cfg.wave_dir_deg)},
      {"wave_components",
       [&](const std::string& v) { cfg.wave_components = static_cast<int>(parse_int("wave_components", v)); }},
      {"wave_gain_surge", number(cfg.wave_gains.surge)},
      {"wave_gain_sway", number(cfg.wave_gains.sway)},
      {"wave_gain_yaw", number(cfg.wave_gains.yaw)},
      {"wind_speed_mps", number(cfg.wind_speed_mps)},
      {"wind_dir_deg", number(cfg.wind_dir_deg)},
      {"wind_coeff_surge", number(cfg.wind_coefficients.surge)},
      {"wind_coeff_sway", number(cfg.wind_coefficients.sway)},
      {"wind_coeff_yaw", number(cfg.wind_coefficients.yaw)},
  };
  auto& vp = cfg.vessel;
  sections["vessel"] = {
      {"mass_diag",
       [&](const std::string& v) {
         const auto d = parse_vector("mass_diag", v, 3);
         vp.mass = Eigen::Vector3d(d[0], d[1], d[2]).asDiagonal();
       }},
      {"mass_matrix",
       [&](const std::string& v) {
         const auto d = parse_vector("mass_matrix", v, 9);
         vp.mass = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(d.data());
       }},
      {"damping_linear_diag",
       [&](const std::string& v) {
         const auto d = parse_vector("damping_linear_diag", v, 3);
         vp.damping_linear = Eigen::Vector3d(d[0], d[1], d[2]).asDiagonal();
       }},
      {"damping_linear_matrix",
       [&](const std::string& v) {
         const auto d = parse_vector("damping_linear_matrix", v, 9);
         vp.damping_linear = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(d.data());
       }},
      {"damping_quadratic",
       [&](const std::string& v) {
         const auto d = parse_vector("damping_quadratic", v, 3);
         vp.damping_quadratic = Eigen::Vector3d(d[0], d[1], d[2]);
       }},
      {"x_bow_thruster", number(vp.x_bow_thruster)},
      {"y_stern_thruster", number(vp.y_stern_thruster)},
      {"stern_angle_deg",
       [&](const std::string& v) { vp.stern_angle = deg2rad(parse_double("stern_angle_deg", v)); }},
      {"stern_max", number(vp.stern_max)},
      {"bow_max", number(vp.bow_max)},
      {"tau_stern", number(vp.tau_stern)},
      {"tau_bow", number(vp.tau_bow)},
      {"bus_voltage", number(vp.bus_voltage)},
      {"k_power", number(vp.k_power)},
  };
  auto& gp = cfg.guidance;
  sections["guidance"] = {
      {"mission_speed", number(gp.mission_speed)},   {"corner_factor", number(gp.corner_factor)},
      {"blend_distance", number(gp.blend_distance)}, {"max_yaw_rate", number(gp.max_yaw_rate)},
      {"turn_radius", number(gp.turn_radius)},       {"l1_distance", number(gp.l1_distance)},
      {"capture_radius", number(gp.capture_radius)}, {"search_window", number(gp.search_window)},
  };
  auto& cc = cfg.control;
  sections["control"] = {
      {"h", [&](const std::string& v) { control_h = parse_double("h", v); }},
      {"lateral_cutoff_deg",
       [&](const std::string& v) { cc.lateral_cutoff = deg2rad(parse_double("lateral_cutoff_deg", v)); }},
  };
  sections["adrc.heading"] = adrc_section(cc.adrc_heading);
  sections["adrc.surge"] = adrc_section(cc.adrc_surge);
  sections["adrc.lateral"] = adrc_section(cc.adrc_lateral);
  sections["pid.heading"] = pid_section(cc.pid_heading);
  sections["pid.surge"] = pid_section(cc.pid_surge);
  sections["pid.lateral"] = pid_section(cc.pid_lateral);
  sections["delay"] = {
      {"tau",
       [&](const std::string& v) {
         const auto d = parse_vector("tau", v, 3);
         cc.delay.tau = {d[0], d[1], d[2]};
       }},
      {"r0", number(cc.delay.r0)},
      {"h0", number(cc.delay.h0)},
      {"enabled", [&](const std::string& v) { cc.delay.enabled = parse_bool("enabled", v); }},
  };

  // Vessel overrides must land before controller defaults are derived from
  // them, so apply [vessel] first and rebuild the controller defaults.
  const auto apply = [&](const std::string& name, const boost::property_tree::ptree& body) {
    const auto section = sections.find(name);
    if (section == sections.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, node] : body) {
      const auto setter = section->second.find(key);
      if (setter == section->second.end()) {
        throw ConfigError("unknown key '" + key + "' in section [" + name + "]");
      }
      try {
        setter->second(node.get_value<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError("[" + name + "] " + key + ": " + e.what());
      }
    }
  };
  for (const auto& [name, body] : tree) {
    if (!body.data().empty()) throw ConfigError("key '" + name + "' outside of any section");
    if (name == "vessel") apply(name, body);
  }
  {
    const auto mode = cc.mode;
    cc = control::ControllerConfig::defaults(vp);
    cc.mode = mode;
  }
  for (const auto& [name, body] : tree) {
    if (name != "vessel") apply(name, body);
  }

  if (control_h) {
    cc.h = *control_h;
    cc.adrc_heading.h = cc.adrc_surge.h = cc.adrc_lateral.h = cc.delay.h = *control_h;
  }

  const bool wants_current = has_current(cfg.condition);
  const bool wants_waves = has_waves(cfg.condition);
  if (current_speed) {
    if (!wants_current && *current_speed != 0.0) {
      throw ConfigError("condition " + to_string(cfg.condition) + " requires zero current");
    }
    if (wants_current && !(*current_speed > 0.0)) {
      throw ConfigError("condition " + to_string(cfg.condition) + " requires a current > 0");
    }
    if (wants_current) cfg.current_speed_mps = *current_speed;
  }
  if (sea_state) {
    if (!wants_waves && *sea_state != 0) {
      throw ConfigError("condition " + to_string(cfg.condition) + " requires sea_state 0");
    }
    if (wants_waves && *sea_state <= 0) {
      throw ConfigError("condition " + to_string(cfg.condition) + " requires sea_state > 0");
    }
    if (wants_waves) cfg.sea_state = *sea_state;
  }

  if (waypoint_text.empty()) throw ConfigError("[scenario] waypoints is required");
  cfg.waypoint_file = std::filesystem::path(waypoint_text);
  if (cfg.waypoint_file.is_relative() && !base_dir.empty()) cfg.waypoint_file = base_dir / cfg.waypoint_file;
  cfg.waypoints = guidance::load_waypoints(cfg.waypoint_file);

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read scenario file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), file.parent_path());
}

}  // namespace usv::experiment
