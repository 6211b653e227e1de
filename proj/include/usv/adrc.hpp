#pragma once

// Second-order nonlinear ADRC: tracking differentiator (TD), extended state
// observer (ESO) and nonlinear state error feedback (NLSEF), composed into a
// single-channel controller stepped at a fixed sample time.

#include <string>
#include <string_view>

namespace usv::adrc {

struct AdrcConfig {
  // Observer gains.
  double beta01 = 100.0;
  double beta02 = 300.0;
  double beta03 = 1000.0;
  // fal exponents and linear-region half-width.
  double alpha1 = 0.5;
  double alpha2 = 0.25;
  double delta = 0.01;
  // Estimated control coefficient (maps u to output acceleration).
  double b0 = 1.0;
  // Tracking differentiator: speed limit and fhan parameters.
  double r_td = 10.0;
  double r0_td = 10.0;
  double h0_td = 0.05;
  // NLSEF fhan parameters and damping factor.
  double r1 = 10.0;
  double h1 = 0.05;
  double c = 1.0;
  // Sample time [s].
  double h = 0.05;
  double u_min = -1.0;
  double u_max = 1.0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct TdState {
  double v1 = 0.0;  // transient setpoint
  double v2 = 0.0;  // transient setpoint rate
};

struct EsoState {
  double z1 = 0.0;  // output estimate
  double z2 = 0.0;  // output-rate estimate
  double z3 = 0.0;  // total-disturbance estimate
  double e = 0.0;   // last innovation z1 - y
};

struct NlsefOutput {
  double u0 = 0.0;  // fhan feedback term before disturbance cancellation
  double u = 0.0;   // clamped control output
  bool saturated = false;
};

struct AdrcTelemetry {
  double v1 = 0.0;
  double v2 = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
  double z3 = 0.0;
  double e = 0.0;
  double u = 0.0;
  bool saturated = false;
};

/// Nonlinear gain: linear with slope delta^(alpha-1) inside |e| <= delta,
/// |e|^alpha * sign(e) outside. Throws NumericalError for non-finite e.
double fal(double e, double alpha, double delta);

/// Discrete time-optimal control for a double integrator with state
/// (x1, x2), acceleration limit r0 and horizon h0. |result| <= r0.
double fhan(double x1, double x2, double r0, double h0);

/// One TD update toward setpoint v. The fhan output is clamped to |u| <= r_td.
TdState td_step(const TdState& td, double v, const AdrcConfig& cfg);

/// One explicit-Euler ESO update with measurement y and applied control u.
/// Throws ObserverDivergence (tagged with `channel`) if any |z| > 1e9.
EsoState eso_step(const EsoState& eso, double y, double u,
                  const AdrcConfig& cfg, std::string_view channel = "adrc");

/// Control law: u0 = -fhan(e1, c*e2, r1, h1), u = clamp((u0 - z3) / b0).
NlsefOutput nlsef_step(const TdState& td, const EsoState& eso,
                       const AdrcConfig& cfg);

/// One ADRC loop. Owns TD/ESO state and the last applied output, which the
/// observer consumes on the following step.
class AdrcChannel {
 public:
  explicit AdrcChannel(AdrcConfig config, std::string name = "adrc");

  /// Puts TD and ESO at rest on `measurement` with zero rate and disturbance.
  void reset(double measurement);

  /// td_step, then eso_step with the previous applied u, then nlsef_step.
  AdrcTelemetry step(double setpoint, double measurement);

  /// Replaces the control the ESO will use on the next step, for when the
  /// actuators delivered less than the last returned u.
  void set_applied(double u) { last_u_ = u; }

  const AdrcConfig& config() const { return config_; }
  const TdState& td() const { return td_; }
  const EsoState& eso() const { return eso_; }
  double last_u() const { return last_u_; }
  const std::string& name() const { return name_; }

 private:
  AdrcConfig config_;
  TdState td_;
  EsoState eso_;
  double last_u_ = 0.0;
  std::string name_;
};

}  // namespace usv::adrc
