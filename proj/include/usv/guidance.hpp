#pragma once

// Waypoint mission -> line/arc reference path, cross-track projection,
// lookahead heading and corner-aware surge setpoint.

#include <Eigen/Dense>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace usv::guidance {

using Vec2 = Eigen::Vector2d;

struct Line {
  Vec2 start;
  Vec2 end;
};

/// Points are center + radius (cos theta, sin theta), theta running from
/// start_angle through start_angle + sweep. sweep > 0 turns toward +psi.
struct Arc {
  Vec2 center;
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;
};

struct PathSegment {
  std::variant<Line, Arc> shape;
  double s_start = 0.0;
  double length = 0.0;

  bool is_arc() const { return std::holds_alternative<Arc>(shape); }
  double s_end() const { return s_start + length; }
};

class DubinsPath {
 public:
  DubinsPath() = default;
  DubinsPath(std::vector<PathSegment> segments, double turn_radius);

  const std::vector<PathSegment>& segments() const { return segments_; }
  double total_length() const { return total_length_; }
  double turn_radius() const { return turn_radius_; }

  Vec2 point_at(double s) const;
  /// Tangent heading atan2(dy, dx) at arc length s.
  double heading_at(double s) const;
  bool on_arc(double s) const;
  Vec2 start() const { return point_at(0.0); }
  Vec2 end() const { return point_at(total_length_); }

  /// Index of the segment containing s (clamped to the path).
  std::size_t segment_index(double s) const;

 private:
  std::vector<PathSegment> segments_;
  double total_length_ = 0.0;
  double turn_radius_ = 0.0;
};

/// Lines between waypoints joined by tangent fillet arcs of `turn_radius`.
/// Throws ConfigError naming the waypoint index when a fillet does not fit.
DubinsPath build_path(std::span<const Vec2> waypoints, double turn_radius);

struct Projection {
  double s = 0.0;
  double y_err = 0.0;     // signed offset; positive on the +90 deg (starboard) side
  double psi_traj = 0.0;  // path tangent heading at s
  Vec2 point = Vec2::Zero();
};

/// Nearest path point with arc length in [s_min, s_max].
Projection project(const DubinsPath& path, const Vec2& position, double s_min = 0.0,
                   double s_max = std::numeric_limits<double>::infinity());

/// Heading from `position` to the first path point beyond `s` lying at
/// Euclidean distance `l1_distance`. Falls back to the nearest point when the
/// vehicle is farther than l1_distance from the path, and to the final point
/// when the circle runs past the end.
double l1_heading(const DubinsPath& path, const Vec2& position, double s, double l1_distance);

/// mission_speed on lines, mission_speed * corner_factor on arcs, linear ramps
/// of length blend_distance before each arc and after it.
double surge_setpoint(const DubinsPath& path, double s, double mission_speed,
                      double corner_factor, double blend_distance);

struct GuidanceParams {
  double mission_speed = 1.4;   // [m/s]
  double corner_factor = 0.6;
  double blend_distance = 4.0;  // [m]
  double max_yaw_rate = 0.35;   // [rad/s]; turn radius = mission_speed / max_yaw_rate
  double turn_radius = 0.0;     // 0 = derive from mission speed
  double l1_distance = 0.0;     // 0 = 2 * turn radius
  double capture_radius = 1.0;  // [m]
  double search_window = 25.0;  // forward projection window [m]

  double effective_turn_radius() const;
  double effective_l1() const;
  void validate() const;
};

struct GuidanceOutput {
  double psi_sp = 0.0;
  double u_sp = 0.0;
  double y_err = 0.0;
  double psi_traj = 0.0;
  double s = 0.0;
  bool complete = false;
};

/// Per-run guidance state. Projection searches forward from the last s.
class Guidance {
 public:
  Guidance(DubinsPath path, GuidanceParams params);

  GuidanceOutput update(const Vec2& position);

  const DubinsPath& path() const { return path_; }
  const GuidanceParams& params() const { return params_; }
  bool complete() const { return complete_; }

 private:
  DubinsPath path_;
  GuidanceParams params_;
  double last_s_ = 0.0;
  bool complete_ = false;
};

/// Plain-text waypoints: one "x y" pair per line in metres, '#' comments.
std::vector<Vec2> parse_waypoints(const std::string& text);
std::vector<Vec2> load_waypoints(const std::filesystem::path& file);

}  // namespace usv::guidance
