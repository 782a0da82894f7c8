#pragma once

#include "geoqa/geometry/geometry.hpp"

namespace geoqa {

inline constexpr double kEarthRadiusM = 6371000.0;

/// Great-circle distance between two lon/lat positions in meters.
double haversine_m(const LonLat& a, const LonLat& b);

/// Minimum distance between two shapes in meters. Zero when they intersect.
/// Closest points on edges are found in a local equirectangular frame and
/// measured with haversine.
double distance_m(const Geometry& a, const Geometry& b);

/// Lower bound on distance_m for any shapes inside the two boxes.
double distance_lower_bound_m(const BoundingBox& a, const BoundingBox& b);

/// Planar area in square meters (equirectangular around the shape's mean
/// latitude). Zero for points and lines.
double area_m2(const Geometry& g);

}  // namespace geoqa
