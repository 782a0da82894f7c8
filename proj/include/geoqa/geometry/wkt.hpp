#pragma once

#include "geoqa/geometry/geometry.hpp"

#include <string>
#include <string_view>

namespace geoqa {

/// Parses OGC WKT for POINT, LINESTRING, POLYGON and MULTIPOLYGON (2D).
/// Throws PositionedError(MalformedWkt) for syntax or invariant violations
/// and Error(UnsupportedKind) for other geometry tags.
Geometry parse_wkt(std::string_view text);

/// Serializes with shortest round-trip decimal coordinates.
std::string to_wkt(const Geometry& geometry);

}  // namespace geoqa
