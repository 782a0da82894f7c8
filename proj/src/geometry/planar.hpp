#pragma once

// Planar primitives on lon/lat coordinates shared by the predicate and
// distance code. Not part of the public interface.

#include "geoqa/geometry/geometry.hpp"

#include <vector>

namespace geoqa::planar {

/// Degrees. Points closer than this to a segment count as lying on it.
inline constexpr double kOnSegmentTolerance = 1e-11;

enum class Location { Interior, Boundary, Exterior };

struct Segment {
    LonLat a;
    LonLat b;
};

double cross(const LonLat& o, const LonLat& a, const LonLat& b);

bool on_segment(const LonLat& p, const Segment& s);

/// Closed-segment intersection, touching included. Degenerate segments
/// (a == b) behave as points.
bool segments_intersect(const Segment& s, const Segment& t);

Location locate_in_ring(const LonLat& p, const Ring& ring);
Location locate_in_polygon(const LonLat& p, const Polygon& polygon);
Location locate(const LonLat& p, const Geometry& g);

/// Every edge of the shape; a point yields one degenerate segment.
std::vector<Segment> segments(const Geometry& g);

/// One vertex per connected piece (point, line, polygon shell).
std::vector<LonLat> component_anchors(const Geometry& g);

/// Splits `s` at every contact with `others` and returns the parameter
/// values in [0, 1] (always including both ends), sorted and deduplicated.
std::vector<double> split_params(const Segment& s, const std::vector<Segment>& others);

LonLat lerp(const Segment& s, double t);

/// A point strictly inside the polygon (not on any ring).
LonLat interior_point(const Polygon& polygon);

}  // namespace geoqa::planar
