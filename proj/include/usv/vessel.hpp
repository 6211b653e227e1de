#pragma once

// 3-DOF planar manoeuvring model for a twin-stern-thruster + bow-thruster
// vessel. Frame: x north, y east, psi clockwise from north; body axes x
// forward, y starboard.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace usv::sim {

struct VesselState {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  Eigen::Vector3d eta() const { return {x, y, psi}; }
  Eigen::Vector3d nu() const { return {u, v, r}; }
  bool finite() const;
};

/// Per-thruster forces (F_SL, F_SR, F_B) in newtons.
struct ThrustCommand {
  double stern_left = 0.0;
  double stern_right = 0.0;
  double bow = 0.0;

  Eigen::Vector3d vec() const { return {stern_left, stern_right, bow}; }
  static ThrustCommand from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
  friend bool operator==(const ThrustCommand&, const ThrustCommand&) = default;
};

struct ThrusterBank {
  ThrustCommand actual;
  ThrustCommand commanded;
};

struct VesselParams {
  Eigen::Matrix3d mass;               // rigid body + added mass
  Eigen::Matrix3d damping_linear;     // D_lin
  Eigen::Vector3d damping_quadratic;  // diagonal of D_quad, applied as |nu_r| nu_r
  double x_bow_thruster = 1.0;        // CG -> bow thruster, longitudinal [m]
  double y_stern_thruster = 0.4;      // CG -> each stern thruster, lateral [m]
  double stern_angle = 0.0;           // inward mounting angle [rad]
  double stern_max = 250.0;           // [N]
  double bow_max = 60.0;              // [N]
  double tau_stern = 0.5;             // thruster lag [s]
  double tau_bow = 0.25;
  double bus_voltage = 48.0;          // [V]
  double k_power = 0.6;               // [W / N^1.5]

  /// Synthetic 2.5 m, ~300 kg vessel.
  static VesselParams defaults();
  void validate() const;

  Eigen::Vector3d thrust_limits() const { return {stern_max, stern_max, bow_max}; }
  Eigen::Vector3d lag_constants() const { return {tau_stern, tau_stern, tau_bow}; }
};

/// Disturbance inputs for one integration step.
struct EnvForces {
  Eigen::Vector2d current = Eigen::Vector2d::Zero();  // world frame [m/s]
  Eigen::Vector3d wave = Eigen::Vector3d::Zero();     // body frame [N, N, N m]
  Eigen::Vector3d wind = Eigen::Vector3d::Zero();     // body frame [N, N, N m]
};

struct StateDerivative {
  Eigen::Vector3d eta_dot;
  Eigen::Vector3d nu_dot;
};

/// Generalised thruster force [X, Y, N].
Eigen::Vector3d thrust_forces(const ThrustCommand& thrust, const VesselParams& params);

Eigen::Matrix3d rotation(double psi);

/// Coriolis-centripetal matrix built from the (symmetric) mass matrix.
Eigen::Matrix3d coriolis(const Eigen::Matrix3d& mass, const Eigen::Vector3d& nu);

/// Relative-velocity manoeuvring model:
///   M nu_r' + C(nu_r) nu_r + D(nu_r) nu_r = tau_thr + tau_wave + tau_wind
///   nu_r = nu - R(psi)^T V_c,  eta' = R(psi) nu.
StateDerivative vessel_derivative(const VesselState& state, const ThrustCommand& thrust,
                                  const EnvForces& env, const VesselParams& params);

/// Clamps each command component to the thruster limits.
ThrustCommand clamp_command(const ThrustCommand& cmd, const VesselParams& params);

/// Electrical power draw [W] of the bank: sum k_power |F_i|^1.5.
double thruster_power(const ThrustCommand& thrust, const VesselParams& params);

/// Fixed-step RK4 integrator over body states, thruster lag and charge.
class Simulator {
 public:
  Simulator(VesselParams params, VesselState initial);

  struct StepResult {
    double charge_delta_ah = 0.0;
    bool clamped[3] = {false, false, false};
  };

  /// Commands are held constant over the step; out-of-range commands are
  /// clamped before entering the lag. Throws NumericalError on non-finite state.
  StepResult step(const ThrustCommand& command, const EnvForces& env, double h);

  const VesselState& state() const { return state_; }
  const ThrusterBank& thrusters() const { return bank_; }
  double charge_used_ah() const { return charge_ah_; }
  double time() const { return time_; }
  std::uint64_t step_index() const { return steps_; }
  const VesselParams& params() const { return params_; }

 private:
  VesselParams params_;
  VesselState state_;
  ThrusterBank bank_;
  double charge_ah_ = 0.0;
  double time_ = 0.0;
  std::uint64_t steps_ = 0;
};

struct ManoeuvreSample {
  double t;
  VesselState state;
  ThrustCommand command;
};

struct ManoeuvreTrace {
  std::vector<ManoeuvreSample> zigzag;
  std::vector<ManoeuvreSample> spin;
};

/// Fixed-time thrust-differential zig-zag: base surge thrust with alternating
/// +/- differential every `phase_s`. Commands switch on multiples of phase_s.
std::vector<ManoeuvreSample> run_zigzag(const VesselParams& params, double h,
                                        double duration_s = 60.0, double phase_s = 10.0);

/// Opposed stern thrust (F_SL = -F_SR) from rest.
std::vector<ManoeuvreSample> run_spin(const VesselParams& params, double h,
                                      double duration_s = 30.0);

/// Both verification manoeuvres at h = 0.01 s.
ManoeuvreTrace zigzag_check(const VesselParams& params);

/// Observed integration order of the zig-zag final state from runs at h,
/// h/2 and h/4: log2(|x_h - x_h/2| / |x_h/2 - x_h/4|).
double zigzag_convergence_order(const VesselParams& params, double h = 0.04);

struct ManoeuvreCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

/// Regression checks on the verification manoeuvres: spin stays in place,
/// zig-zag yaw alternates, zero command holds still, RK4 order >= 3.5.
std::vector<ManoeuvreCheck> verify_manoeuvres(const VesselParams& params);

}  // namespace usv::sim
