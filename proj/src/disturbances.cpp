#include "usv/disturbances.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "usv/angles.hpp"
#include "usv/errors.hpp"

namespace usv::env {
namespace {

double propagation_direction(double from_deg) { return deg2rad(from_deg) + std::numbers::pi; }

}  // namespace

double significant_wave_height(int sea_state) {
  static constexpr std::array<double, 5> kHs = {0.0, 0.1, 0.5, 1.25, 2.5};
  if (sea_state < 0 || sea_state > 4) {
    throw ConfigError("sea_state must be in [0, 4], got " + std::to_string(sea_state));
  }
  return kHs[static_cast<std::size_t>(sea_state)];
}

double pm_spectrum(double omega, double hs) {
  if (!(omega > 0.0) || !(hs > 0.0)) return 0.0;
  const double g2 = kGravity * kGravity;
  const double b = 4.0 * kPiersonMoskowitzAlpha * g2 / (hs * hs);
  const double w4 = omega * omega * omega * omega;
  return kPiersonMoskowitzAlpha * g2 / (w4 * omega) * std::exp(-b / w4);
}

double pm_variance(double hs) { return hs * hs / 16.0; }

WaveField sample_pm_spectrum(int sea_state, int n_components, std::uint64_t seed,
                             double from_deg) {
  if (n_components < 1) throw ConfigError("wave field needs at least one component");
  const double hs = significant_wave_height(sea_state);
  WaveField field;
  field.sea_state = sea_state;
  field.rng_seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  const double direction = propagation_direction(from_deg);
  const double m0 = pm_variance(hs);
  const double amplitude = std::sqrt(2.0 * m0 / n_components);
  const double b = hs > 0.0 ? 4.0 * kPiersonMoskowitzAlpha * kGravity * kGravity / (hs * hs) : 0.0;

  field.components.reserve(static_cast<std::size_t>(n_components));
  for (int i = 0; i < n_components; ++i) {
    // Cumulative energy fraction is exp(-B / w^4); invert at each bin's centre.
    const double p = (i + 0.5) / n_components;
    const double omega = hs > 0.0 ? std::pow(b / -std::log(p), 0.25) : 0.0;
    field.components.push_back({amplitude, omega, phase_dist(rng), direction});
  }
  return field;
}

Eigen::Vector3d wave_force(const WaveField& field, double t, double psi,
                           const WaveForceGains& gains) {
  Eigen::Vector3d f = Eigen::Vector3d::Zero();
  for (const auto& c : field.components) {
    if (c.amplitude == 0.0) continue;
    const double beta = c.direction - psi;
    const double elevation = c.amplitude * std::sin(c.omega * t + c.phase);
    f[0] += gains.surge * elevation * std::cos(beta);
    f[1] += gains.sway * elevation * std::sin(beta);
    f[2] += gains.yaw * elevation * std::sin(2.0 * beta);
  }
  return f;
}

Eigen::Vector3d wind_force(double wind_speed, double from_deg, double psi,
                           const WindCoefficients& coeff) {
  const double gamma = deg2rad(from_deg) - psi;  // 0 = headwind
  const double q = wind_speed * wind_speed;
  return {-coeff.surge * q * std::cos(gamma), -coeff.sway * q * std::sin(gamma),
          -coeff.yaw * q * std::sin(2.0 * gamma)};
}

Eigen::Vector2d current_velocity(double speed, double from_deg) {
  const double dir = propagation_direction(from_deg);
  return {speed * std::cos(dir), speed * std::sin(dir)};
}

}  // namespace usv::env
