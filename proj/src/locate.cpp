#include "nlosim/locate.hpp"

#include <cmath>
#include <stdexcept>

namespace nlosim {
namespace {

/// Max perpendicular deviation of the anchors from the line through the two
/// farthest-apart anchors.
double collinearity_deviation(const std::vector<Anchor>& anchors) {
  double best = -1.0;
  std::size_t ia = 0, ib = 1;
  for (std::size_t i = 0; i < anchors.size(); ++i)
    for (std::size_t j = i + 1; j < anchors.size(); ++j) {
      const double d = anchors[i].position.dist(anchors[j].position);
      if (d > best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  if (best <= 0.0) return 0.0;
  const Point2D a = anchors[ia].position;
  const Point2D dir = (anchors[ib].position - a) * (1.0 / best);
  double dev = 0.0;
  for (const Anchor& an : anchors) {
    const Point2D r = an.position - a;
    dev = std::max(dev, std::abs(dir.cross(r)));
  }
  return dev;
}

double objective(const std::vector<Anchor>& anchors, const Point2D& p) {
  double s = 0.0;
  for (const Anchor& a : anchors) {
    const double e = p.dist(a.position) - a.distance_m;
    s += a.weight * e * e;
  }
  return s;
}

}  // namespace

Point2D reflection_point(const Point2D& radar, double d_rs, double phi_rad) {
  if (d_rs <= 0) throw std::invalid_argument("reflection distance must be positive");
  return {radar.x + d_rs * std::cos(phi_rad), radar.y + d_rs * std::sin(phi_rad)};
}

std::vector<Point2D> circle_intersections(const Anchor& a, const Anchor& b) {
  const double d = a.position.dist(b.position);
  const double r1 = a.distance_m, r2 = b.distance_m;
  if (!(d > 1e-9)) return {};
  // Measured legs carry error; circles that miss by under a quarter of the
  // larger radius count as tangent rather than disjoint.
  const double slack = 0.25 * std::max(r1, r2);
  if (d > r1 + r2 + slack || d + slack < std::abs(r1 - r2)) return {};
  const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
  const double h2 = r1 * r1 - along * along;
  const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
  const Point2D u = (b.position - a.position) * (1.0 / d);
  const Point2D base{a.position.x + along * u.x, a.position.y + along * u.y};
  if (h <= 1e-9) return {base};
  return {{base.x - h * u.y, base.y + h * u.x},
          {base.x + h * u.y, base.y - h * u.x}};
}

std::vector<double> compute_weights(const std::vector<double>& strengths) {
  if (strengths.empty()) throw std::invalid_argument("no strengths");
  double total = 0.0;
  for (double s : strengths) {
    if (!(s > 0)) throw std::invalid_argument("strengths must be positive");
    total += s;
  }
  std::vector<double> w(strengths.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = strengths[i] / total;
  return w;
}

LocalizationEstimate wls_multilaterate(const std::vector<Anchor>& anchors,
                                       const Point2D* initial_guess) {
  if (anchors.size() < 3)
    throw std::invalid_argument("need at least three anchors");
  double wsum = 0.0;
  for (const Anchor& a : anchors) {
    if (!(a.weight > 0)) throw std::invalid_argument("weights must be positive");
    if (!(a.distance_m > 0))
      throw std::invalid_argument("anchor distances must be positive");
    wsum += a.weight;
  }
  if (collinearity_deviation(anchors) <= 0.01)
    throw std::invalid_argument("anchors are collinear");

  Point2D p{0.0, 0.0};
  if (initial_guess != nullptr) {
    p = *initial_guess;
  } else {
    for (const Anchor& a : anchors) {
      p.x += a.weight * a.position.x;
      p.y += a.weight * a.position.y;
    }
    p.x /= wsum;
    p.y /= wsum;
  }

  LocalizationEstimate est;
  est.anchors_used = static_cast<int>(anchors.size());
  double cost = objective(anchors, p);
  const int max_iters = 100;
  for (int it = 0; it < max_iters; ++it) {
    // Gauss-Newton normal equations for residuals r_i = |p - a_i| - d_i.
    double h00 = 0.0, h01 = 0.0, h11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (const Anchor& a : anchors) {
      const Point2D diff = p - a.position;
      const double dist = std::max(diff.norm(), 1e-12);
      const double ux = diff.x / dist, uy = diff.y / dist;
      const double r = dist - a.distance_m;
      h00 += a.weight * ux * ux;
      h01 += a.weight * ux * uy;
      h11 += a.weight * uy * uy;
      g0 += a.weight * ux * r;
      g1 += a.weight * uy * r;
    }
    const double det = h00 * h11 - h01 * h01;
    double dx, dy;
    if (std::abs(det) > 1e-15) {
      dx = -(h11 * g0 - h01 * g1) / det;
      dy = -(-h01 * g0 + h00 * g1) / det;
    } else {
      dx = -g0;
      dy = -g1;
    }

    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 20; ++half) {
      const Point2D trial{p.x + scale * dx, p.y + scale * dy};
      const double c = objective(anchors, trial);
      if (c < cost) {
        p = trial;
        cost = c;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    const double step = std::hypot(scale * dx, scale * dy);
    if (!improved || step < 1e-6) {
      est.converged = true;
      break;
    }
  }
  est.position = p;
  est.residual = cost;
  return est;
}

}  // namespace nlosim
