#include "usv/control.hpp"

#include <algorithm>
#include <cmath>

#include "usv/angles.hpp"
#include "usv/errors.hpp"

namespace usv::control {

ThrustCommand mix(const ControlDemand& d, const sim::VesselParams& p) {
  const double ca = std::cos(p.stern_angle);
  if (!(ca > 0.1)) throw ConfigError("mixer: stern thruster angle too close to perpendicular");
  if (!(p.y_stern_thruster > 0.0)) throw ConfigError("mixer: y_stern_thruster must be > 0");
  const double differential = (d.yaw_moment + d.sway_force * p.x_bow_thruster) / p.y_stern_thruster;
  return {(d.surge_force + differential) / (2.0 * ca), (d.surge_force - differential) / (2.0 * ca),
          d.sway_force};
}

ThrustCommand allocate(const ControlDemand& d, const sim::VesselParams& p) {
  ControlDemand clipped = d;
  clipped.sway_force = std::clamp(d.sway_force, -p.bow_max, p.bow_max);
  const ThrustCommand raw = mix(clipped, p);
  const double common = 0.5 * (raw.stern_left + raw.stern_right);
  const double half_diff = std::clamp(0.5 * (raw.stern_left - raw.stern_right), -p.stern_max, p.stern_max);
  const double room = p.stern_max - std::abs(half_diff);
  const double surge = std::clamp(common, -room, room);
  return {surge + half_diff, surge - half_diff, clipped.sway_force};
}

ControlDemand demand_from_thrust(const ThrustCommand& t, const sim::VesselParams& p) {
  const Eigen::Vector3d tau = sim::thrust_forces(t, p);
  return {tau[0], tau[1], tau[2]};
}

void DelayCompensatorConfig::validate() const {
  for (double t : tau) {
    if (!(t > 0.0)) throw ConfigError("delay compensator time constants must be > 0");
  }
  if (!(r0 > 0.0) || !(h0 > 0.0) || !(h > 0.0)) {
    throw ConfigError("delay compensator TD parameters must be > 0");
  }
}

DelayCompensator::DelayCompensator(DelayCompensatorConfig config) : config_(config) {
  config_.validate();
  td_config_.h = config_.h;
  td_config_.r_td = config_.r0;
  td_config_.r0_td = config_.r0;
  td_config_.h0_td = config_.h0;
}

ThrustCommand DelayCompensator::compensate(const ThrustCommand& gamma) {
  const Eigen::Vector3d g = gamma.vec();
  if (!primed_) {
    for (int i = 0; i < 3; ++i) td_[i] = {g[i], 0.0};
    primed_ = true;
  }
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    td_[i] = adrc::td_step(td_[i], g[i], td_config_);
    out[i] = g[i] + (config_.enabled ? config_.tau[i] * td_[i].v2 : 0.0);
  }
  return ThrustCommand::from(out);
}

std::array<double, 3> DelayCompensator::derivative() const {
  return {td_[0].v2, td_[1].v2, td_[2].v2};
}

void PidGains::validate() const {
  if (!std::isfinite(kp) || !std::isfinite(ki) || !std::isfinite(kd)) {
    throw ConfigError("PID gains must be finite");
  }
  if (!(integrator_limit > 0.0)) throw ConfigError("PID integrator_limit must be > 0");
  if (!(u_min < u_max)) throw ConfigError("PID u_min must be < u_max");
}

PidOutput pid_step(PidState& s, double setpoint, double measurement, const PidGains& g, double h,
                   bool wrap_angle) {
  const double error = wrap_angle ? wrap_pi(setpoint - measurement) : setpoint - measurement;
  if (s.primed) {
    const double delta = measurement - s.prev_measurement;
    s.rate = (wrap_angle ? wrap_pi(delta) : delta) / h;
  } else {
    s.rate = 0.0;
    s.primed = true;
  }
  s.prev_measurement = measurement;

  const double raw = g.kp * error + g.ki * s.integral - g.kd * s.rate;
  PidOutput out;
  out.u = std::clamp(raw, g.u_min, g.u_max);
  out.saturated = out.u != raw;

  // Anti-windup: hold the integrator while saturated in the error's direction.
  const bool pushing_further = (raw > g.u_max && error > 0.0) || (raw < g.u_min && error < 0.0);
  if (!pushing_further && g.ki != 0.0) {
    const double bound = g.integrator_limit / std::abs(g.ki);
    s.integral = std::clamp(s.integral + error * h, -bound, bound);
  }
  return out;
}

std::string to_string(ControllerMode mode) { return mode == ControllerMode::Adrc ? "ADRC" : "PID"; }

ControllerMode controller_mode_from_string(const std::string& text) {
  if (text == "ADRC" || text == "adrc") return ControllerMode::Adrc;
  if (text == "PID" || text == "pid") return ControllerMode::Pid;
  throw ConfigError("unknown controller '" + text + "' (expected ADRC or PID)");
}

ControllerConfig ControllerConfig::defaults(const sim::VesselParams& params) {
  ControllerConfig c;
  c.h = 0.05;

  const double m11 = params.mass(0, 0);
  const double m22 = params.mass(1, 1);
  const double m33 = params.mass(2, 2);

  auto& hd = c.adrc_heading;
  hd.h = c.h;
  hd.b0 = 1.0 / m33;
  hd.beta01 = 43.56;
  hd.beta02 = 200.1;
  hd.beta03 = 544.6;
  hd.delta = 0.1;
  // A slow heading profile lets the lateral channel hold the path through
  // corners instead of following the lookahead's corner cut.
  hd.r_td = 0.03386;
  hd.r0_td = 0.5;
  hd.h0_td = 1.460;
  hd.r1 = 0.04271;
  hd.h1 = 1.339;
  hd.c = 0.3931;
  hd.u_min = -120.0;
  hd.u_max = 120.0;

  auto& su = c.adrc_surge;
  su.h = c.h;
  su.b0 = 1.0 / (m11 * params.tau_stern);
  su.beta01 = 18.0;
  su.beta02 = 24.0;
  su.beta03 = 24.0;
  su.delta = 0.05;
  su.r_td = su.r0_td = 0.5;
  su.h0_td = c.h;
  su.r1 = 1.0;
  su.h1 = 0.7;
  su.c = 1.0;
  su.u_min = -150.0;
  su.u_max = 450.0;

  auto& la = c.adrc_lateral;
  la.h = c.h;
  la.b0 = 1.0 / m22;
  la.beta01 = 53.04;
  la.beta02 = 419.3;
  la.beta03 = 1652.0;
  la.delta = 0.2;
  la.r_td = la.r0_td = 1.0;
  la.h0_td = c.h;
  la.r1 = 1.791;
  la.h1 = 0.2691;
  la.c = 0.4639;
  la.u_min = -1.5 * params.bow_max;
  la.u_max = 1.5 * params.bow_max;

  // Tuned for the lowest calm-water cross-track error on the harbour mission.
  c.pid_heading = {153.8, 158.9, 1006.0, 60.0, -120.0, 120.0};
  c.pid_surge = {55.76, 533.4, 0.0, 300.0, -150.0, 450.0};
  c.pid_lateral = {1984.0, 10.86, 2934.0, 60.0, -1.5 * params.bow_max, 1.5 * params.bow_max};

  c.delay.h = c.h;
  c.delay.tau = {params.tau_stern, params.tau_stern, params.tau_bow};
  return c;
}

void ControllerConfig::validate() const {
  if (!(h > 0.0)) throw ConfigError("controller sample time must be > 0");
  for (const auto* a : {&adrc_heading, &adrc_surge, &adrc_lateral}) {
    a->validate();
    if (a->h != h) throw ConfigError("all ADRC channels must share the controller sample time");
  }
  for (const auto* p : {&pid_heading, &pid_surge, &pid_lateral}) p->validate();
  delay.validate();
  if (delay.h != h) throw ConfigError("delay compensator must run at the controller sample time");
  if (!(lateral_cutoff > 0.0)) throw ConfigError("lateral_cutoff must be > 0");
}

TrajectoryController::TrajectoryController(ControllerConfig config, sim::VesselParams params)
    : config_(std::move(config)),
      params_(std::move(params)),
      heading_(config_.adrc_heading, "heading"),
      surge_(config_.adrc_surge, "surge"),
      lateral_(config_.adrc_lateral, "lateral"),
      compensator_(config_.delay) {
  config_.validate();
  params_.validate();
}

void TrajectoryController::reset(const guidance::GuidanceOutput& g, const sim::VesselState& s) {
  heading_unwrapped_ = s.psi;
  last_psi_ = s.psi;
  heading_.reset(s.psi);
  surge_.reset(s.u);
  lateral_.reset(g.y_err);
  pid_heading_ = {};
  pid_surge_ = {};
  pid_lateral_ = {};
  compensator_ = DelayCompensator(config_.delay);
  primed_ = true;
}

ThrustCommand TrajectoryController::step(const guidance::GuidanceOutput& g,
                                         const sim::VesselState& s) {
  if (!primed_) reset(g, s);
  heading_unwrapped_ += wrap_pi(s.psi - last_psi_);
  last_psi_ = s.psi;

  ControlTelemetry t;
  t.heading.setpoint = g.psi_sp;
  t.heading.measurement = s.psi;
  t.surge.setpoint = g.u_sp;
  t.surge.measurement = s.u;
  t.lateral.setpoint = 0.0;
  t.lateral.measurement = g.y_err;

  auto fill = [](ChannelTelemetry& ch, const adrc::AdrcTelemetry& a) {
    ch.z1 = a.z1;
    ch.z2 = a.z2;
    ch.z3 = a.z3;
    ch.u = a.u;
    ch.saturated = a.saturated;
  };
  auto fill_pid = [&](ChannelTelemetry& ch, const PidState& st, const PidGains& gains,
                      const PidOutput& o) {
    ch.z1 = ch.measurement;
    ch.z2 = st.rate;
    ch.z3 = gains.ki * st.integral;
    ch.u = o.u;
    ch.saturated = o.saturated;
  };

  if (config_.mode == ControllerMode::Adrc) {
    // Heading error enters the channel wrapped; the channel itself runs on a
    // continuous heading so TD/ESO never see a 2 pi jump.
    const double heading_sp = heading_unwrapped_ + wrap_pi(g.psi_sp - s.psi);
    fill(t.heading, heading_.step(heading_sp, heading_unwrapped_));
    fill(t.surge, surge_.step(g.u_sp, s.u));
    fill(t.lateral, lateral_.step(0.0, g.y_err));
  } else {
    const double h = config_.h;
    fill_pid(t.heading, pid_heading_, config_.pid_heading,
             pid_step(pid_heading_, g.psi_sp, s.psi, config_.pid_heading, h, true));
    fill_pid(t.surge, pid_surge_, config_.pid_surge,
             pid_step(pid_surge_, g.u_sp, s.u, config_.pid_surge, h));
    fill_pid(t.lateral, pid_lateral_, config_.pid_lateral,
             pid_step(pid_lateral_, 0.0, g.y_err, config_.pid_lateral, h));
  }

  t.lateral_raw = t.lateral.u;
  const double misalignment = wrap_pi(s.psi - g.psi_traj);
  const double sway =
      std::abs(misalignment) > config_.lateral_cutoff ? 0.0 : t.lateral_raw * std::cos(misalignment);
  t.demand = {t.surge.u, sway, t.heading.u};
  t.mixed = allocate(t.demand, params_);
  t.achieved = demand_from_thrust(t.mixed, params_);
  t.compensated = compensator_.compensate(t.mixed);

  const Eigen::Vector3d limits = params_.thrust_limits();
  const Eigen::Vector3d requested = mix(t.demand, params_).vec();
  for (int i = 0; i < 3; ++i) t.thruster_saturated[i] = std::abs(requested[i]) >= limits[i];

  if (config_.mode == ControllerMode::Adrc) {
    // The observers must see the force that was actually delivered, or a
    // saturated actuator reads as a growing disturbance.
    heading_.set_applied(t.achieved.yaw_moment);
    surge_.set_applied(t.achieved.surge_force);
    lateral_.set_applied(t.achieved.sway_force);
  }
  telemetry_ = t;
  return t.compensated;
}

}  // namespace usv::control
