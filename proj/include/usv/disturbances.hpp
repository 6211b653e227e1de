#pragma once

// Environmental force generators: uniform current, Pierson-Moskowitz wave
// force synthesis and constant wind. Directions follow the "coming from"
// convention in degrees clockwise from north, like a weather report.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace usv::env {

struct WaveComponent {
  double amplitude = 0.0;  // [m]
  double omega = 0.0;      // [rad/s]
  double phase = 0.0;      // [rad]
  double direction = 0.0;  // propagation direction, world frame [rad]
};

struct WaveField {
  int sea_state = 0;
  std::vector<WaveComponent> components;
  std::uint64_t rng_seed = 0;
};

/// Per-axis force per metre of component amplitude.
struct WaveForceGains {
  double surge = 40.0;  // [N/m]
  double sway = 40.0;   // [N/m]
  double yaw = 10.0;    // [N m/m]
};

struct WindCoefficients {
  double surge = 0.6;  // [N/(m/s)^2]
  double sway = 1.2;   // [N/(m/s)^2]
  double yaw = 0.4;    // [N m/(m/s)^2]
};

constexpr double kGravity = 9.81;
constexpr double kPiersonMoskowitzAlpha = 8.1e-3;

/// Significant wave height [m] for sea states 0..4.
double significant_wave_height(int sea_state);

/// S(omega) = A g^2 / omega^5 exp(-B / omega^4) with B = 4 A g^2 / Hs^2,
/// which makes the zeroth moment exactly Hs^2 / 16.
double pm_spectrum(double omega, double hs);

/// Zeroth spectral moment (elevation variance) for Hs.
double pm_variance(double hs);

/// Discretises the spectrum into n equal-energy sinusoids with seeded
/// uniform phases. All components propagate away from `from_deg`.
WaveField sample_pm_spectrum(int sea_state, int n_components, std::uint64_t seed,
                             double from_deg = 0.0);

/// Body-frame force: sum a_i sin(w_i t + phi_i) projected by encounter angle
/// beta = direction - psi onto (cos beta, sin beta, sin 2 beta) axes.
Eigen::Vector3d wave_force(const WaveField& field, double t, double psi,
                           const WaveForceGains& gains = {});

/// Quadratic drag on the wind's angle relative to the bow.
Eigen::Vector3d wind_force(double wind_speed, double from_deg, double psi,
                           const WindCoefficients& coeff = {});

/// World-frame current velocity for a current setting away from `from_deg`.
Eigen::Vector2d current_velocity(double speed, double from_deg);

}  // namespace usv::env
