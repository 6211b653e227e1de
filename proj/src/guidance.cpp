#include "usv/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "usv/angles.hpp"
#include "usv/errors.hpp"

namespace usv::guidance {
namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }
Vec2 rot90(const Vec2& v) { return {-v.y(), v.x()}; }
double bearing(const Vec2& from, const Vec2& to) {
  const Vec2 d = to - from;
  return std::atan2(d.y(), d.x());
}

Vec2 point_on(const PathSegment& seg, double local) {
  if (const auto* line = std::get_if<Line>(&seg.shape)) {
    if (seg.length == 0.0) return line->start;
    return line->start + (line->end - line->start) * (local / seg.length);
  }
  const auto& arc = std::get<Arc>(seg.shape);
  const double theta = arc.start_angle + std::copysign(local / arc.radius, arc.sweep);
  return arc.center + arc.radius * Vec2(std::cos(theta), std::sin(theta));
}

double heading_on(const PathSegment& seg, double local) {
  if (const auto* line = std::get_if<Line>(&seg.shape)) return bearing(line->start, line->end);
  const auto& arc = std::get<Arc>(seg.shape);
  const double theta = arc.start_angle + std::copysign(local / arc.radius, arc.sweep);
  return wrap_pi(theta + std::copysign(kPi / 2.0, arc.sweep));
}

/// Unconstrained nearest local arc length on the segment, clamped to [lo, hi].
double nearest_local(const PathSegment& seg, const Vec2& p, double lo, double hi) {
  if (const auto* line = std::get_if<Line>(&seg.shape)) {
    if (seg.length == 0.0) return lo;
    const Vec2 dir = (line->end - line->start) / seg.length;
    return std::clamp(dir.dot(p - line->start), lo, hi);
  }
  const auto& arc = std::get<Arc>(seg.shape);
  const Vec2 rel = p - arc.center;
  const double span = std::abs(arc.sweep);
  double angle = 0.5 * span;
  if (rel.squaredNorm() > 0.0) {
    const double phi = std::atan2(rel.y(), rel.x());
    const double sgn = arc.sweep >= 0.0 ? 1.0 : -1.0;
    // Angular offset from the arc start, centred on the arc midpoint.
    angle = 0.5 * span + wrap_pi(sgn * (phi - arc.start_angle) - 0.5 * span);
  }
  return std::clamp(angle * arc.radius, lo, hi);
}

}  // namespace

DubinsPath::DubinsPath(std::vector<PathSegment> segments, double turn_radius)
    : segments_(std::move(segments)), turn_radius_(turn_radius) {
  double s = 0.0;
  for (auto& seg : segments_) {
    seg.s_start = s;
    s += seg.length;
  }
  total_length_ = s;
}

std::size_t DubinsPath::segment_index(double s) const {
  if (segments_.empty()) throw ConfigError("empty path");
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                                   [](double value, const PathSegment& seg) {
                                     return value < seg.s_end();
                                   });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

Vec2 DubinsPath::point_at(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const auto& seg = segments_[segment_index(s)];
  return point_on(seg, std::clamp(s - seg.s_start, 0.0, seg.length));
}

double DubinsPath::heading_at(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const auto& seg = segments_[segment_index(s)];
  return heading_on(seg, std::clamp(s - seg.s_start, 0.0, seg.length));
}

bool DubinsPath::on_arc(double s) const {
  if (s < 0.0 || s > total_length_) return false;
  return segments_[segment_index(s)].is_arc();
}

DubinsPath build_path(std::span<const Vec2> wp, double turn_radius) {
  if (wp.size() < 2) throw ConfigError("path needs at least 2 waypoints");
  if (!(turn_radius > 0.0)) throw ConfigError("turn radius must be > 0");

  const std::size_t n = wp.size();
  std::vector<double> turn(n, 0.0);
  std::vector<double> tangent_len(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double leg = (wp[i + 1] - wp[i]).norm();
    if (!(leg > 2.0 * turn_radius)) {
      throw ConfigError("waypoints " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " are closer than twice the turn radius");
    }
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 d_in = (wp[i] - wp[i - 1]).normalized();
    const Vec2 d_out = (wp[i + 1] - wp[i]).normalized();
    turn[i] = std::atan2(cross(d_in, d_out), d_in.dot(d_out));
    if (std::abs(turn[i]) < 1e-9) {
      turn[i] = 0.0;
      continue;
    }
    if (std::abs(turn[i]) > kPi - 1e-6) {
      throw ConfigError("waypoint " + std::to_string(i) + " reverses the path direction");
    }
    tangent_len[i] = turn_radius * std::tan(0.5 * std::abs(turn[i]));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double leg = (wp[i + 1] - wp[i]).norm();
    if (tangent_len[i] + tangent_len[i + 1] > leg) {
      const std::size_t culprit = tangent_len[i] >= tangent_len[i + 1] ? i : i + 1;
      throw ConfigError("fillet at waypoint " + std::to_string(culprit) +
                        " does not fit between its neighbours");
    }
  }

  std::vector<PathSegment> segments;
  auto add_line = [&](const Vec2& a, const Vec2& b) {
    const double len = (b - a).norm();
    if (len > 1e-12) segments.push_back({Line{a, b}, 0.0, len});
  };

  Vec2 cursor = wp[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (turn[i] == 0.0) continue;
    const Vec2 d_in = (wp[i] - wp[i - 1]).normalized();
    const Vec2 d_out = (wp[i + 1] - wp[i]).normalized();
    const Vec2 entry = wp[i] - tangent_len[i] * d_in;
    const Vec2 exit = wp[i] + tangent_len[i] * d_out;
    add_line(cursor, entry);
    const Vec2 center = entry + turn_radius * std::copysign(1.0, turn[i]) * rot90(d_in);
    const Vec2 rel = entry - center;
    const Arc arc{center, turn_radius, std::atan2(rel.y(), rel.x()), turn[i]};
    segments.push_back({arc, 0.0, turn_radius * std::abs(turn[i])});
    cursor = exit;
  }
  add_line(cursor, wp[n - 1]);
  return DubinsPath(std::move(segments), turn_radius);
}

Projection project(const DubinsPath& path, const Vec2& position, double s_min, double s_max) {
  const double total = path.total_length();
  s_min = std::clamp(s_min, 0.0, total);
  s_max = std::clamp(s_max, s_min, total);

  Projection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& seg : path.segments()) {
    if (seg.s_end() < s_min || seg.s_start > s_max) continue;
    const double lo = std::max(0.0, s_min - seg.s_start);
    const double hi = std::min(seg.length, s_max - seg.s_start);
    const double local = nearest_local(seg, position, lo, hi);
    const Vec2 pt = point_on(seg, local);
    const double dist = (position - pt).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best.s = seg.s_start + local;
      best.point = pt;
      best.psi_traj = heading_on(seg, local);
    }
  }
  const Vec2 tangent(std::cos(best.psi_traj), std::sin(best.psi_traj));
  const double side = cross(tangent, position - best.point);
  best.y_err = side < 0.0 ? -best_dist : best_dist;
  return best;
}

double l1_heading(const DubinsPath& path, const Vec2& position, double s, double l1_distance) {
  if (!(l1_distance > 0.0)) throw ConfigError("L1 distance must be > 0");
  const double total = path.total_length();
  s = std::clamp(s, 0.0, total);
  auto dist = [&](double q) { return (path.point_at(q) - position).norm(); };

  if (dist(s) >= l1_distance) return bearing(position, path.point_at(s));

  const double step = l1_distance / 8.0;
  double lo = s;
  while (true) {
    const double hi = std::min(lo + step, total);
    if (dist(hi) >= l1_distance) {
      double a = lo;
      double b = hi;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (a + b);
        (dist(mid) >= l1_distance ? b : a) = mid;
      }
      return bearing(position, path.point_at(b));
    }
    if (hi >= total) return bearing(position, path.end());
    lo = hi;
  }
}

double surge_setpoint(const DubinsPath& path, double s, double mission_speed,
                      double corner_factor, double blend_distance) {
  double factor = 1.0;
  for (const auto& seg : path.segments()) {
    if (!seg.is_arc()) continue;
    double weight = 0.0;
    if (s >= seg.s_start && s <= seg.s_end()) {
      weight = 1.0;
    } else if (blend_distance > 0.0) {
      const double gap = s < seg.s_start ? seg.s_start - s : s - seg.s_end();
      weight = std::max(0.0, 1.0 - gap / blend_distance);
    }
    factor = std::min(factor, 1.0 - weight * (1.0 - corner_factor));
  }
  return mission_speed * factor;
}

double GuidanceParams::effective_turn_radius() const {
  return turn_radius > 0.0 ? turn_radius : mission_speed / max_yaw_rate;
}

double GuidanceParams::effective_l1() const {
  return l1_distance > 0.0 ? l1_distance : 2.0 * effective_turn_radius();
}

void GuidanceParams::validate() const {
  if (!(mission_speed > 0.0)) throw ConfigError("mission_speed must be > 0");
  if (!(corner_factor > 0.0 && corner_factor <= 1.0)) {
    throw ConfigError("corner_factor must be in (0, 1]");
  }
  if (!(blend_distance >= 0.0)) throw ConfigError("blend_distance must be >= 0");
  if (turn_radius <= 0.0 && !(max_yaw_rate > 0.0)) throw ConfigError("max_yaw_rate must be > 0");
  if (!(capture_radius > 0.0)) throw ConfigError("capture_radius must be > 0");
  if (!(search_window > 0.0)) throw ConfigError("search_window must be > 0");
  if (l1_distance < 0.0 || turn_radius < 0.0) throw ConfigError("negative guidance distance");
}

Guidance::Guidance(DubinsPath path, GuidanceParams params)
    : path_(std::move(path)), params_(params) {
  params_.validate();
}

GuidanceOutput Guidance::update(const Vec2& position) {
  const Projection proj = project(path_, position, last_s_, last_s_ + params_.search_window);
  last_s_ = proj.s;

  const Vec2 end = path_.end();
  const double end_heading = path_.heading_at(path_.total_length());
  const Vec2 end_tangent(std::cos(end_heading), std::sin(end_heading));
  const bool past_end = proj.s >= path_.total_length() - 1e-9 &&
                        end_tangent.dot(position - end) > 0.0;
  if ((position - end).norm() <= params_.capture_radius || past_end) complete_ = true;

  GuidanceOutput out;
  out.s = proj.s;
  out.y_err = proj.y_err;
  out.psi_traj = proj.psi_traj;
  out.complete = complete_;
  out.psi_sp = complete_ ? bearing(position, end)
                         : l1_heading(path_, position, proj.s, params_.effective_l1());
  out.u_sp = surge_setpoint(path_, proj.s, params_.mission_speed, params_.corner_factor,
                            params_.blend_distance);
  return out;
}

std::vector<Vec2> parse_waypoints(const std::string& text) {
  std::vector<Vec2> points;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double x = 0.0;
    double y = 0.0;
    std::string extra;
    if (!(fields >> x)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError("waypoints line " + std::to_string(line_no) + ": expected 'x y'");
    }
    if (!(fields >> y) || (fields >> extra)) {
      throw ConfigError("waypoints line " + std::to_string(line_no) + ": expected 'x y'");
    }
    points.emplace_back(x, y);
  }
  return points;
}

std::vector<Vec2> load_waypoints(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read waypoint file " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_waypoints(buf.str());
}

}  // namespace usv::guidance
