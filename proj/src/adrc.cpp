#include "usv/adrc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usv/errors.hpp"

namespace usv::adrc {
namespace {

constexpr double kDivergenceLimit = 1e9;

double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("AdrcConfig: ") + what);
}

}  // namespace

void AdrcConfig::validate() const {
  const double all[] = {beta01, beta02, beta03, alpha1, alpha2, delta, b0,
                        r_td,   r0_td,  h0_td,  r1,     h1,     c,     h,
                        u_min,  u_max};
  for (double v : all) require(std::isfinite(v), "non-finite parameter");
  require(h > 0.0, "h must be > 0");
  require(delta > 0.0, "delta must be > 0");
  require(alpha2 > 0.0 && alpha2 <= alpha1 && alpha1 <= 1.0,
          "require 0 < alpha2 <= alpha1 <= 1");
  require(beta01 > 0.0 && beta02 > 0.0 && beta03 > 0.0, "beta0i must be > 0");
  require(b0 != 0.0, "b0 must be nonzero");
  require(u_min < u_max, "u_min must be < u_max");
  require(r_td > 0.0 && r0_td > 0.0 && h0_td > 0.0, "TD parameters must be > 0");
  require(r1 > 0.0 && h1 > 0.0, "NLSEF r1, h1 must be > 0");
}

double fal(double e, double alpha, double delta) {
  if (!std::isfinite(e)) throw NumericalError("fal: non-finite error input");
  if (std::abs(e) <= delta) return e / std::pow(delta, 1.0 - alpha);
  return std::pow(std::abs(e), alpha) * sign(e);
}

double fhan(double x1, double x2, double r0, double h0) {
  if (!std::isfinite(x1) || !std::isfinite(x2) || !std::isfinite(r0) ||
      !std::isfinite(h0)) {
    throw NumericalError("fhan: non-finite input");
  }
  const double d = r0 * h0;
  const double d0 = h0 * d;
  const double y = x1 + h0 * x2;
  const double a0 = std::sqrt(d * d + 8.0 * r0 * std::abs(y));
  const double a = std::abs(y) > d0 ? x2 + 0.5 * (a0 - d) * sign(y) : x2 + y / h0;
  if (std::abs(a) > d) return -r0 * sign(a);
  return -r0 * a / d;
}

TdState td_step(const TdState& td, double v, const AdrcConfig& cfg) {
  const double u =
      std::clamp(fhan(td.v1 - v, td.v2, cfg.r0_td, cfg.h0_td), -cfg.r_td, cfg.r_td);
  return {td.v1 + cfg.h * td.v2, td.v2 + cfg.h * u};
}

EsoState eso_step(const EsoState& eso, double y, double u, const AdrcConfig& cfg,
                  std::string_view channel) {
  const double e = eso.z1 - y;
  EsoState next;
  next.e = e;
  next.z1 = eso.z1 + cfg.h * (eso.z2 - cfg.beta01 * e);
  next.z2 = eso.z2 + cfg.h * (eso.z3 + cfg.b0 * u - cfg.beta02 * fal(e, cfg.alpha1, cfg.delta));
  next.z3 = eso.z3 + cfg.h * (-cfg.beta03 * fal(e, cfg.alpha2, cfg.delta));
  for (double z : {next.z1, next.z2, next.z3}) {
    if (!std::isfinite(z) || std::abs(z) > kDivergenceLimit) {
      throw ObserverDivergence(std::string(channel),
                               "observer divergence in channel '" +
                                   std::string(channel) + "'");
    }
  }
  return next;
}

NlsefOutput nlsef_step(const TdState& td, const EsoState& eso, const AdrcConfig& cfg) {
  const double e1 = td.v1 - eso.z1;
  const double e2 = td.v2 - eso.z2;
  NlsefOutput out;
  // fhan drives its first argument to zero; the tracked error is z1 - v1.
  out.u0 = -fhan(e1, cfg.c * e2, cfg.r1, cfg.h1);
  const double raw = (out.u0 - eso.z3) / cfg.b0;
  out.u = std::clamp(raw, cfg.u_min, cfg.u_max);
  out.saturated = raw != out.u;
  return out;
}

AdrcChannel::AdrcChannel(AdrcConfig config, std::string name)
    : config_(config), name_(std::move(name)) {
  config_.validate();
  last_u_ = std::clamp(0.0, config_.u_min, config_.u_max);
}

void AdrcChannel::reset(double measurement) {
  td_ = {measurement, 0.0};
  eso_ = {measurement, 0.0, 0.0, 0.0};
  last_u_ = std::clamp(0.0, config_.u_min, config_.u_max);
}

AdrcTelemetry AdrcChannel::step(double setpoint, double measurement) {
  td_ = td_step(td_, setpoint, config_);
  if (!std::isfinite(td_.v1) || !std::isfinite(td_.v2)) {
    throw NumericalError("tracking differentiator non-finite in channel '" + name_ + "'");
  }
  eso_ = eso_step(eso_, measurement, last_u_, config_, name_);
  const NlsefOutput law = nlsef_step(td_, eso_, config_);
  last_u_ = law.u;
  return {td_.v1, td_.v2, eso_.z1, eso_.z2, eso_.z3, eso_.e, law.u, law.saturated};
}

}  // namespace usv::adrc
