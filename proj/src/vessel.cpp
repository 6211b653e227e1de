#include "usv/vessel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usv/angles.hpp"
#include "usv/errors.hpp"

namespace usv::sim {
namespace {

// Integrated quantities: x y psi u v r | F_SL F_SR F_B | charge [Ah]
using Augmented = Eigen::Matrix<double, 10, 1>;

Augmented pack(const VesselState& s, const ThrustCommand& f, double charge) {
  Augmented a;
  a << s.x, s.y, s.psi, s.u, s.v, s.r, f.stern_left, f.stern_right, f.bow, charge;
  return a;
}

}  // namespace

bool VesselState::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) && std::isfinite(u) &&
         std::isfinite(v) && std::isfinite(r);
}

VesselParams VesselParams::defaults() {
  VesselParams p;
  // 300 kg hull, I_z ~ 120 kg m^2, plus added mass (30, 150, 40).
  p.mass = Eigen::Vector3d(330.0, 450.0, 160.0).asDiagonal();
  p.damping_linear = Eigen::Vector3d(40.0, 150.0, 80.0).asDiagonal();
  p.damping_quadratic = Eigen::Vector3d(60.0, 400.0, 60.0);
  p.x_bow_thruster = 1.0;
  p.y_stern_thruster = 0.4;
  p.stern_angle = deg2rad(5.0);
  p.stern_max = 250.0;
  p.bow_max = 60.0;
  p.tau_stern = 0.5;
  p.tau_bow = 0.25;
  p.bus_voltage = 48.0;
  p.k_power = 0.6;
  return p;
}

void VesselParams::validate() const {
  if (!mass.allFinite() || !damping_linear.allFinite() || !damping_quadratic.allFinite()) {
    throw ConfigError("VesselParams: non-finite matrix entry");
  }
  if (!mass.isApprox(mass.transpose(), 1e-12)) {
    throw ConfigError("VesselParams: mass matrix must be symmetric");
  }
  if (Eigen::LLT<Eigen::Matrix3d>(mass).info() != Eigen::Success) {
    throw ConfigError("VesselParams: mass matrix must be positive definite");
  }
  if (!(stern_max > 0.0) || !(bow_max > 0.0)) {
    throw ConfigError("VesselParams: thrust limits must be > 0");
  }
  if (!(tau_stern > 0.0) || !(tau_bow > 0.0)) {
    throw ConfigError("VesselParams: thruster time constants must be > 0");
  }
  if (!(y_stern_thruster > 0.0)) throw ConfigError("VesselParams: y_stern_thruster must be > 0");
  if (!(bus_voltage > 0.0) || !(k_power >= 0.0)) {
    throw ConfigError("VesselParams: bus_voltage must be > 0 and k_power >= 0");
  }
}

Eigen::Vector3d thrust_forces(const ThrustCommand& t, const VesselParams& p) {
  const double ca = std::cos(p.stern_angle);
  return {(t.stern_left + t.stern_right) * ca, t.bow,
          (t.stern_left - t.stern_right) * p.y_stern_thruster * ca - t.bow * p.x_bow_thruster};
}

Eigen::Matrix3d rotation(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Eigen::Matrix3d r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Eigen::Matrix3d coriolis(const Eigen::Matrix3d& m, const Eigen::Vector3d& nu) {
  const double c13 = -(m(1, 0) * nu[0] + m(1, 1) * nu[1] + m(1, 2) * nu[2]);
  const double c23 = m(0, 0) * nu[0] + m(0, 1) * nu[1] + m(0, 2) * nu[2];
  Eigen::Matrix3d c;
  c << 0.0, 0.0, c13, 0.0, 0.0, c23, -c13, -c23, 0.0;
  return c;
}

StateDerivative vessel_derivative(const VesselState& s, const ThrustCommand& thrust,
                                  const EnvForces& env, const VesselParams& p) {
  const Eigen::Matrix3d rot = rotation(s.psi);
  const Eigen::Vector3d nu = s.nu();
  const Eigen::Vector3d current_world(env.current[0], env.current[1], 0.0);
  const Eigen::Vector3d nu_c = rot.transpose() * current_world;
  const Eigen::Vector3d nu_r = nu - nu_c;

  const Eigen::Vector3d damping =
      p.damping_linear * nu_r + p.damping_quadratic.cwiseProduct(nu_r.cwiseAbs()).cwiseProduct(nu_r);
  const Eigen::Vector3d tau = thrust_forces(thrust, p) + env.wave + env.wind;
  const Eigen::Vector3d nu_r_dot =
      p.mass.ldlt().solve(tau - coriolis(p.mass, nu_r) * nu_r - damping);
  // d/dt (R^T V_c) for a constant, uniform current.
  const Eigen::Vector3d nu_c_dot(s.r * nu_c[1], -s.r * nu_c[0], 0.0);

  return {rot * nu, nu_r_dot + nu_c_dot};
}

ThrustCommand clamp_command(const ThrustCommand& cmd, const VesselParams& p) {
  return {std::clamp(cmd.stern_left, -p.stern_max, p.stern_max),
          std::clamp(cmd.stern_right, -p.stern_max, p.stern_max),
          std::clamp(cmd.bow, -p.bow_max, p.bow_max)};
}

double thruster_power(const ThrustCommand& t, const VesselParams& p) {
  return p.k_power * (std::pow(std::abs(t.stern_left), 1.5) +
                      std::pow(std::abs(t.stern_right), 1.5) + std::pow(std::abs(t.bow), 1.5));
}

Simulator::Simulator(VesselParams params, VesselState initial)
    : params_(std::move(params)), state_(initial) {
  params_.validate();
  state_.psi = wrap_pi(state_.psi);
}

Simulator::StepResult Simulator::step(const ThrustCommand& command, const EnvForces& env,
                                      double h) {
  if (!(h > 0.0)) throw ConfigError("Simulator::step: h must be > 0");
  StepResult result;
  const ThrustCommand target = clamp_command(command, params_);
  result.clamped[0] = target.stern_left != command.stern_left;
  result.clamped[1] = target.stern_right != command.stern_right;
  result.clamped[2] = target.bow != command.bow;
  bank_.commanded = command;

  const Eigen::Vector3d target_vec = target.vec();
  const Eigen::Vector3d lag = params_.lag_constants();
  const double amp_hours_per_joule = 1.0 / (params_.bus_voltage * 3600.0);

  auto deriv = [&](const Augmented& a) {
    const VesselState s{a[0], a[1], a[2], a[3], a[4], a[5]};
    const ThrustCommand f{a[6], a[7], a[8]};
    const StateDerivative d = vessel_derivative(s, f, env, params_);
    Augmented out;
    out.segment<3>(0) = d.eta_dot;
    out.segment<3>(3) = d.nu_dot;
    out.segment<3>(6) = (target_vec - a.segment<3>(6)).cwiseQuotient(lag);
    out[9] = thruster_power(f, params_) * amp_hours_per_joule;
    return out;
  };

  const Augmented y0 = pack(state_, bank_.actual, charge_ah_);
  const Augmented k1 = deriv(y0);
  const Augmented k2 = deriv(y0 + 0.5 * h * k1);
  const Augmented k3 = deriv(y0 + 0.5 * h * k2);
  const Augmented k4 = deriv(y0 + h * k3);
  const Augmented y1 = y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  ++steps_;
  if (!y1.allFinite()) {
    throw NumericalError("vessel state became non-finite at step " + std::to_string(steps_));
  }
  state_ = {y1[0], y1[1], wrap_pi(y1[2]), y1[3], y1[4], y1[5]};
  bank_.actual = clamp_command({y1[6], y1[7], y1[8]}, params_);
  result.charge_delta_ah = std::max(0.0, y1[9] - charge_ah_);
  charge_ah_ += result.charge_delta_ah;
  time_ += h;
  return result;
}

std::vector<ManoeuvreSample> run_zigzag(const VesselParams& params, double h,
                                        double duration_s, double phase_s) {
  constexpr double kBase = 60.0;
  constexpr double kDifferential = 40.0;
  Simulator sim(params, {});
  std::vector<ManoeuvreSample> trace;
  const auto steps = static_cast<std::int64_t>(std::llround(duration_s / h));
  const auto per_phase = static_cast<std::int64_t>(std::llround(phase_s / h));
  trace.push_back({0.0, sim.state(), {}});
  for (std::int64_t k = 0; k < steps; ++k) {
    const double sgn = ((k / per_phase) % 2 == 0) ? 1.0 : -1.0;
    const ThrustCommand cmd{kBase + sgn * kDifferential, kBase - sgn * kDifferential, 0.0};
    sim.step(cmd, {}, h);
    trace.push_back({static_cast<double>(k + 1) * h, sim.state(), cmd});
  }
  return trace;
}

std::vector<ManoeuvreSample> run_spin(const VesselParams& params, double h, double duration_s) {
  constexpr double kCouple = 40.0;
  Simulator sim(params, {});
  std::vector<ManoeuvreSample> trace;
  const auto steps = static_cast<std::int64_t>(std::llround(duration_s / h));
  const ThrustCommand cmd{kCouple, -kCouple, 0.0};
  trace.push_back({0.0, sim.state(), {}});
  for (std::int64_t k = 0; k < steps; ++k) {
    sim.step(cmd, {}, h);
    trace.push_back({static_cast<double>(k + 1) * h, sim.state(), cmd});
  }
  return trace;
}

ManoeuvreTrace zigzag_check(const VesselParams& params) {
  return {run_zigzag(params, 0.01), run_spin(params, 0.01)};
}

}  // namespace usv::sim

namespace usv::sim {
namespace {

Eigen::Matrix<double, 6, 1> state_difference(const VesselState& a, const VesselState& b) {
  Eigen::Matrix<double, 6, 1> d;
  d << a.x - b.x, a.y - b.y, wrap_pi(a.psi - b.psi), a.u - b.u, a.v - b.v, a.r - b.r;
  return d;
}

}  // namespace

double zigzag_convergence_order(const VesselParams& params, double h) {
  const VesselState coarse = run_zigzag(params, h).back().state;
  const VesselState mid = run_zigzag(params, h / 2.0).back().state;
  const VesselState fine = run_zigzag(params, h / 4.0).back().state;
  const double e1 = state_difference(coarse, mid).norm();
  const double e2 = state_difference(mid, fine).norm();
  return std::log2(e1 / e2);
}

std::vector<ManoeuvreCheck> verify_manoeuvres(const VesselParams& params) {
  std::vector<ManoeuvreCheck> checks;
  const ManoeuvreTrace trace = zigzag_check(params);

  double drift = 0.0;
  for (const auto& s : trace.spin) drift = std::max(drift, std::hypot(s.state.x, s.state.y));
  checks.push_back({"spin_max_displacement_m", drift, 0.5, drift < 0.5});

  // Yaw rate sign at the end of each 10 s phase must alternate.
  int flips = 0;
  int phases = 0;
  double previous = 0.0;
  for (std::size_t i = 0; i < trace.zigzag.size(); ++i) {
    const double t = trace.zigzag[i].t;
    if (i == 0 || std::abs(std::remainder(t, 10.0)) > 1e-9) continue;
    const double r = trace.zigzag[i].state.r;
    if (phases > 0 && r * previous < 0.0) ++flips;
    previous = r;
    ++phases;
  }
  const int expected = std::max(0, phases - 1);
  checks.push_back({"zigzag_yaw_sign_alternations", static_cast<double>(flips),
                    static_cast<double>(expected), phases > 1 && flips == expected});

  Simulator idle(params, {});
  for (int k = 0; k < 1000; ++k) idle.step({}, {}, 0.01);
  const double still = idle.state().nu().norm() + idle.state().eta().norm();
  checks.push_back({"zero_command_state_norm", still, 1e-12, still <= 1e-12});

  const double order = zigzag_convergence_order(params);
  checks.push_back({"rk4_observed_order", order, 3.5, order >= 3.5});
  return checks;
}

}  // namespace usv::sim
