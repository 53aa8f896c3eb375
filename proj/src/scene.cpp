#include "nlosim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nlosim {
namespace {

constexpr double kEps = 1e-12;

int orientation_sign(const Point2D& a, const Point2D& b, const Point2D& c) {
  const double v = (b - a).cross(c - a);
  // Scale-aware tolerance so near-collinear triples classify stably.
  const double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x),
                                 std::abs(b.y), std::abs(c.x), std::abs(c.y),
                                 1.0});
  if (std::abs(v) <= kEps * scale * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Point2D& a, const Point2D& b, const Point2D& p) {
  return std::min(a.x, b.x) - kEps <= p.x && p.x <= std::max(a.x, b.x) + kEps &&
         std::min(a.y, b.y) - kEps <= p.y && p.y <= std::max(a.y, b.y) + kEps;
}

/// Intersection test where [p1,p2] is treated as an open segment (its
/// endpoints do not count) and [q1,q2] as closed.
bool open_segment_intersects(const Point2D& p1, const Point2D& p2,
                             const Point2D& q1, const Point2D& q2) {
  const int o1 = orientation_sign(q1, q2, p1);
  const int o2 = orientation_sign(q1, q2, p2);
  const int o3 = orientation_sign(p1, p2, q1);
  const int o4 = orientation_sign(p1, p2, q2);

  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0) return true;

  // Collinear overlap cases. A shared region longer than a point blocks;
  // touching exactly at an endpoint of the open segment does not.
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    const Point2D dir = p2 - p1;
    const double len2 = dir.dot(dir);
    if (len2 <= kEps) return false;
    double t1 = dir.dot(q1 - p1) / len2;
    double t2 = dir.dot(q2 - p1) / len2;
    if (t1 > t2) std::swap(t1, t2);
    const double lo = std::max(t1, 0.0);
    const double hi = std::min(t2, 1.0);
    return hi - lo > kEps;  // overlap in the open interior
  }

  // One endpoint of the obstacle lies on the open segment interior.
  if (o3 == 0 && on_segment(p1, p2, q1) &&
      q1.dist(p1) > kEps && q1.dist(p2) > kEps)
    return true;
  if (o4 == 0 && on_segment(p1, p2, q2) &&
      q2.dist(p1) > kEps && q2.dist(p2) > kEps)
    return true;
  // An endpoint of the open segment lying on the obstacle does not block
  // (reflection points sit exactly on their own reflector).
  return false;
}

bool segments_collinear_overlapping(const Point2D& a1, const Point2D& a2,
                                    const Point2D& b1, const Point2D& b2) {
  if (orientation_sign(a1, a2, b1) != 0 || orientation_sign(a1, a2, b2) != 0)
    return false;
  const Point2D dir = a2 - a1;
  const double len2 = dir.dot(dir);
  double t1 = dir.dot(b1 - a1) / len2;
  double t2 = dir.dot(b2 - a1) / len2;
  if (t1 > t2) std::swap(t1, t2);
  return std::min(t2, 1.0) - std::max(t1, 0.0) > kEps;
}

}  // namespace

double Point2D::norm() const { return std::hypot(x, y); }

void validate_scene(const Scene& scene) {
  std::set<std::string> ids;
  for (const auto& t : scene.targets) {
    if (t.id.empty())
      throw std::invalid_argument("target id must be non-empty");
    if (!ids.insert(t.id).second)
      throw std::invalid_argument("duplicate target id: " + t.id);
    if (t.position.dist(scene.radar) <= kEps)
      throw std::invalid_argument("target coincides with radar: " + t.id);
  }
  for (std::size_t i = 0; i < scene.reflectors.size(); ++i) {
    const auto& r = scene.reflectors[i];
    if (r.endpoint_a.dist(r.endpoint_b) <= kEps)
      throw std::invalid_argument("reflector has coincident endpoints");
    if (!(r.scatter_coeff > 0.0 && r.scatter_coeff <= 1.0))
      throw std::invalid_argument("scatter_coeff must be in (0, 1]");
    if (!(r.absorption >= 0.0 && r.absorption < 1.0))
      throw std::invalid_argument("absorption must be in [0, 1)");
    for (std::size_t j = i + 1; j < scene.reflectors.size(); ++j) {
      const auto& s = scene.reflectors[j];
      if (segments_collinear_overlapping(r.endpoint_a, r.endpoint_b,
                                         s.endpoint_a, s.endpoint_b))
        throw std::invalid_argument(
            "reflectors overlap along a common line (ambiguous geometry)");
    }
  }
  for (const auto& o : scene.obstacles) {
    if (o.endpoint_a.dist(o.endpoint_b) <= kEps)
      throw std::invalid_argument("obstacle has coincident endpoints");
  }
}

const Target& find_target(const Scene& scene, const std::string& target_id) {
  for (const auto& t : scene.targets)
    if (t.id == target_id) return t;
  throw std::invalid_argument("unknown target id: " + target_id);
}

bool segment_blocked(const Scene& scene, const Point2D& from,
                     const Point2D& to) {
  for (const auto& o : scene.obstacles) {
    if (open_segment_intersects(from, to, o.endpoint_a, o.endpoint_b))
      return true;
  }
  return false;
}

bool is_direct_path_blocked(const Scene& scene, const std::string& target_id) {
  const Target& t = find_target(scene, target_id);
  return segment_blocked(scene, scene.radar, t.position);
}

std::vector<PathGeometry> enumerate_first_order_paths(
    const Scene& scene, const std::string& target_id) {
  const Target& target = find_target(scene, target_id);
  std::vector<PathGeometry> paths;

  for (std::size_t i = 0; i < scene.reflectors.size(); ++i) {
    const auto& r = scene.reflectors[i];
    const Point2D seg = r.endpoint_b - r.endpoint_a;
    const double seg_len2 = seg.dot(seg);

    // Mirror the radar across the reflector's supporting line; the specular
    // point is where mirror -> target crosses that line.
    const Point2D rel = scene.radar - r.endpoint_a;
    const double along = seg.dot(rel) / seg_len2;
    const Point2D foot = r.endpoint_a + seg * along;
    const Point2D mirror = scene.radar + (foot - scene.radar) * 2.0;

    const Point2D mt = target.position - mirror;
    // Parametrize the supporting line crossing: solve mirror + s*mt on line.
    const double denom = mt.cross(seg);
    if (std::abs(denom) <= kEps) continue;  // parallel: no specular crossing
    const double s = (r.endpoint_a - mirror).cross(seg) / denom;
    if (s <= kEps || s >= 1.0 - kEps) continue;  // crossing not between them
    const Point2D p_s = mirror + mt * s;

    // Strictly inside the segment.
    const double t = seg.dot(p_s - r.endpoint_a) / seg_len2;
    if (t <= kEps || t >= 1.0 - kEps) continue;

    // Radar and target must sit on the same side of the wall.
    const double side_r = seg.cross(scene.radar - r.endpoint_a);
    const double side_t = seg.cross(target.position - r.endpoint_a);
    if (side_r * side_t <= 0.0) continue;

    if (segment_blocked(scene, scene.radar, p_s)) continue;
    if (segment_blocked(scene, p_s, target.position)) continue;

    PathGeometry g;
    g.reflector_index = static_cast<int>(i);
    g.p_s = p_s;
    g.d_rs = scene.radar.dist(p_s);
    g.d_st = p_s.dist(target.position);
    g.d_total = g.d_rs + g.d_st;
    g.aoa_phi = wrap_angle(std::atan2(p_s.y - scene.radar.y,
                                      p_s.x - scene.radar.x));
    g.attenuation =
        r.scatter_coeff * (1.0 - r.absorption) / (g.d_total * g.d_total);
    paths.push_back(g);
  }
  return paths;
}

Point2D virtual_target_position(const Point2D& radar, const Point2D& p_s,
                                double d_rs, double d_total) {
  if (d_rs <= 0.0)
    throw std::invalid_argument("d_rs must be positive");
  if (d_total < d_rs)
    throw std::invalid_argument("d_total must be >= d_rs");
  return radar + (p_s - radar) * (d_total / d_rs);
}

}  // namespace nlosim
