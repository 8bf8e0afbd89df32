#pragma once

#include "fasense/geometry.hpp"

namespace fasense {

/// Spacing slack [m] tolerated when checking the minimum-distance constraint.
inline constexpr double kSpacingTol = 1e-12;

/// One slot's antenna placement: sorted transmit coordinates x and receive
/// coordinates y, all within [0, D] with adjacent spacing >= D_min.
struct ArrayLayout {
  VecX x;  // transmit element coordinates [m], ascending
  VecX y;  // receive element coordinates [m], ascending
};

/// True when `coords` is ascending, inside [0, aperture], and every adjacent
/// pair is at least `min_spacing - kSpacingTol` apart.
inline bool coords_feasible(const VecX& coords, double aperture, double min_spacing) {
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    if (coords(i) < 0.0 || coords(i) > aperture) return false;
    if (i > 0 && coords(i) - coords(i - 1) < min_spacing - kSpacingTol) return false;
  }
  return true;
}

inline bool layout_feasible(const ArrayLayout& l, double aperture, double min_spacing) {
  return coords_feasible(l.x, aperture, min_spacing) &&
         coords_feasible(l.y, aperture, min_spacing);
}

/// Coordinates 0, spacing, 2*spacing, ...
inline VecX uniform_coords(int count, double spacing) {
  VecX coords(count);
  for (int i = 0; i < count; ++i) coords(i) = i * spacing;
  return coords;
}

/// Uniform array spanning [0, aperture].
inline VecX max_spread_coords(int count, double aperture) {
  return uniform_coords(count, aperture / (count - 1));
}

/// Two minimum-spaced blocks pushed against the aperture ends; maximizes the
/// centered second moment over the feasible set.
inline VecX edge_cluster_coords(int count, double aperture, double min_spacing) {
  VecX coords(count);
  const int left = (count + 1) / 2;
  for (int i = 0; i < left; ++i) coords(i) = i * min_spacing;
  for (int i = left; i < count; ++i) coords(i) = aperture - (count - 1 - i) * min_spacing;
  return coords;
}

}  // namespace fasense
