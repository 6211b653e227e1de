#pragma once

// Trajectory controller: three parallel channels (heading, surge, lateral
// offset), lateral-force heading projection, control mixer and thruster delay
// compensator. ADRC and PID modes share everything except the channel laws.

#include <array>
#include <string>

#include "usv/adrc.hpp"
#include "usv/guidance.hpp"
#include "usv/vessel.hpp"

namespace usv::control {

using sim::ThrustCommand;

struct ControlDemand {
  double surge_force = 0.0;  // F_x [N]
  double sway_force = 0.0;   // F_y [N]
  double yaw_moment = 0.0;   // M_z [N m]
};

/// Allocates (F_x, F_y, M_z) to (F_SL, F_SR, F_B); the bow thruster takes all
/// of F_y and the stern pair cancels its moment. Throws ConfigError when
/// cos(stern_angle) <= 0.1 or y_stern_thruster <= 0.
ThrustCommand mix(const ControlDemand& demand, const sim::VesselParams& params);

/// Thruster-limited allocation: F_y is clipped to the bow limit, then the
/// stern pair keeps as much of the turning differential as fits and spends
/// what is left on surge. Result is always within the thruster limits.
ThrustCommand allocate(const ControlDemand& demand, const sim::VesselParams& params);

/// Inverse of mix via the plant's thrust model.
ControlDemand demand_from_thrust(const ThrustCommand& thrust, const sim::VesselParams& params);

struct DelayCompensatorConfig {
  std::array<double, 3> tau = {0.5, 0.5, 0.25};  // stern, stern, bow [s]
  double r0 = 1e6;   // TD acceleration limit; large = differentiation mode
  double h0 = 0.1;   // TD horizon; > h smooths the derivative estimate
  double h = 0.05;   // sample time
  bool enabled = true;

  void validate() const;
};

/// Gamma_bar = Gamma + tau * d/dt Gamma, with each derivative taken from a
/// tracking differentiator.
class DelayCompensator {
 public:
  explicit DelayCompensator(DelayCompensatorConfig config);

  ThrustCommand compensate(const ThrustCommand& gamma);
  std::array<double, 3> derivative() const;
  const DelayCompensatorConfig& config() const { return config_; }

 private:
  DelayCompensatorConfig config_;
  adrc::AdrcConfig td_config_;
  std::array<adrc::TdState, 3> td_{};
  bool primed_ = false;
};

struct PidGains {
  double kp = 1.0;
  double ki = 0.0;
  double kd = 0.0;
  double integrator_limit = 1.0;  // bound on |ki * integral|, in output units
  double u_min = -1.0;
  double u_max = 1.0;

  void validate() const;
};

struct PidState {
  double integral = 0.0;          // integral of error [error units * s]
  double prev_measurement = 0.0;
  double rate = 0.0;              // last measured rate
  bool primed = false;
};

struct PidOutput {
  double u = 0.0;
  bool saturated = false;
};

/// Parallel PID, derivative on measurement, clamped integrator. While the
/// output is saturated the integrator only moves toward unsaturating.
/// With wrap_angle the error and measured rate are wrapped to (-pi, pi].
PidOutput pid_step(PidState& state, double setpoint, double measurement, const PidGains& gains,
                   double h, bool wrap_angle = false);

enum class ControllerMode { Adrc, Pid };

std::string to_string(ControllerMode mode);
ControllerMode controller_mode_from_string(const std::string& text);

struct ControllerConfig {
  ControllerMode mode = ControllerMode::Adrc;
  double h = 0.05;
  adrc::AdrcConfig adrc_heading;
  adrc::AdrcConfig adrc_surge;
  adrc::AdrcConfig adrc_lateral;
  PidGains pid_heading;
  PidGains pid_surge;
  PidGains pid_lateral;
  DelayCompensatorConfig delay;
  double lateral_cutoff = 1.5707963267948966;  // |psi - psi_traj| beyond this zeroes F_y

  /// Tuned gains for VesselParams::defaults().
  static ControllerConfig defaults(const sim::VesselParams& params);
  void validate() const;
};

struct ChannelTelemetry {
  double setpoint = 0.0;
  double measurement = 0.0;
  double z1 = 0.0;  // ADRC: ESO states. PID: measurement, measured rate,
  double z2 = 0.0;  //   integral contribution.
  double z3 = 0.0;
  double u = 0.0;
  bool saturated = false;
};

struct ControlTelemetry {
  ChannelTelemetry heading;
  ChannelTelemetry surge;
  ChannelTelemetry lateral;
  double lateral_raw = 0.0;
  ControlDemand demand;       // requested by the channels
  ControlDemand achieved;     // what the allocated thrust delivers
  ThrustCommand mixed;        // allocated mixer output Gamma
  ThrustCommand compensated;  // Gamma_bar, sent to the plant
  // Unconstrained mix of the requested demand reaches a thruster limit.
  std::array<bool, 3> thruster_saturated = {false, false, false};
};

class TrajectoryController {
 public:
  TrajectoryController(ControllerConfig config, sim::VesselParams params);

  /// Re-initialises all channels on the current measurements.
  void reset(const guidance::GuidanceOutput& guidance, const sim::VesselState& state);

  /// One control tick. Returns the compensated thrust command.
  ThrustCommand step(const guidance::GuidanceOutput& guidance, const sim::VesselState& state);

  const ControlTelemetry& telemetry() const { return telemetry_; }
  const ControllerConfig& config() const { return config_; }

 private:
  ControllerConfig config_;
  sim::VesselParams params_;
  adrc::AdrcChannel heading_;
  adrc::AdrcChannel surge_;
  adrc::AdrcChannel lateral_;
  PidState pid_heading_;
  PidState pid_surge_;
  PidState pid_lateral_;
  DelayCompensator compensator_;
  double heading_unwrapped_ = 0.0;
  double last_psi_ = 0.0;
  bool primed_ = false;
  ControlTelemetry telemetry_;
};

}  // namespace usv::control
