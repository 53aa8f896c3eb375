#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlosim/common.hpp"

namespace nlosim {

struct Point2D {
  double x = 0.0;
  double y = 0.0;

  Point2D operator+(const Point2D& o) const { return {x + o.x, y + o.y}; }
  Point2D operator-(const Point2D& o) const { return {x - o.x, y - o.y}; }
  Point2D operator*(double s) const { return {x * s, y * s}; }
  double dot(const Point2D& o) const { return x * o.x + y * o.y; }
  double cross(const Point2D& o) const { return x * o.y - y * o.x; }
  double norm() const;
  double dist(const Point2D& o) const { return (*this - o).norm(); }
};

/// Flat wall segment. `scatter_coeff` is the fraction of incident energy
/// scattered back along the incident direction, `absorption` the fraction
/// lost in the interaction with the surface.
struct Reflector {
  Point2D endpoint_a;
  Point2D endpoint_b;
  double scatter_coeff = 0.8;  // in (0, 1]
  double absorption = 0.1;     // in [0, 1)
};

struct Obstacle {
  Point2D endpoint_a;
  Point2D endpoint_b;
};

struct Target {
  std::string id;
  Point2D position;
};

struct Scene {
  Point2D radar;
  std::vector<Reflector> reflectors;
  std::vector<Obstacle> obstacles;
  std::vector<Target> targets;
};

/// One single-bounce radar -> reflector -> target path.
/// `aoa_phi` is the bearing of the reflection point seen from the radar,
/// measured from the +x axis in (-pi, pi].
struct PathGeometry {
  int reflector_index = -1;
  Point2D p_s;        // specular reflection point on the reflector segment
  double d_rs = 0.0;  // radar -> reflection point
  double d_st = 0.0;  // reflection point -> target
  double d_total = 0.0;
  double aoa_phi = 0.0;
  double attenuation = 0.0;  // scatter_coeff * (1 - absorption) / d_total^2
};

/// Validates invariants (coefficient ranges, distinct endpoints, unique
/// target ids, no collinear-overlapping reflector pair). Throws
/// std::invalid_argument on violation.
void validate_scene(const Scene& scene);

/// True when the open segment from -> to intersects any obstacle segment.
/// Touching an obstacle endpoint counts; collinear but disjoint does not.
bool segment_blocked(const Scene& scene, const Point2D& from,
                     const Point2D& to);

/// True when the direct radar -> target segment is blocked by an obstacle.
bool is_direct_path_blocked(const Scene& scene, const std::string& target_id);

/// All single-bounce specular paths radar -> reflector -> target for one
/// target. A path exists when the mirror-image construction yields a
/// reflection point strictly inside the reflector segment and neither leg
/// is blocked by an obstacle. Results are ordered by reflector index.
std::vector<PathGeometry> enumerate_first_order_paths(
    const Scene& scene, const std::string& target_id);

/// Mirror point of the target behind the reflecting surface: the point at
/// distance d_total from the radar along the bearing of the reflection
/// point. Throws std::invalid_argument if d_rs <= 0 or d_total < d_rs.
Point2D virtual_target_position(const Point2D& radar, const Point2D& p_s,
                                double d_rs, double d_total);

const Target& find_target(const Scene& scene, const std::string& target_id);

}  // namespace nlosim
