#pragma once

#include <vector>

#include "nlosim/scene.hpp"

namespace nlosim {

/// Multilateration anchor: a reflection point with the measured residual
/// path distance (reflection point -> target) and its weight.
struct Anchor {
  Point2D position;
  double distance_m = 0.0;  // d_st
  double weight = 1.0;
};

struct LocalizationEstimate {
  Point2D position;
  double residual = 0.0;  // final weighted squared-error sum
  int anchors_used = 0;
  bool converged = false;
};

/// Reflection point from a radar-frame polar detection:
/// radar + d_rs * (cos(phi), sin(phi)).
Point2D reflection_point(const Point2D& radar, double d_rs, double phi_rad);

/// Intersection points of two range circles, at most two. Circles missing
/// each other by under a quarter of the larger radius count as tangent;
/// coincident centers give none.
std::vector<Point2D> circle_intersections(const Anchor& a, const Anchor& b);

/// Normalizes positive strengths to weights summing to 1.
/// Throws std::invalid_argument on empty input or nonpositive entries.
std::vector<double> compute_weights(const std::vector<double>& strengths);

/// Damped Gauss-Newton minimizer of sum_i w_i (|p - a_i| - d_i)^2 with
/// step halving; init defaults to the weighted anchor centroid. Requires
/// >= 3 anchors, non-collinear within 1 cm perpendicular deviation.
LocalizationEstimate wls_multilaterate(
    const std::vector<Anchor>& anchors,
    const Point2D* initial_guess = nullptr);

}  // namespace nlosim
