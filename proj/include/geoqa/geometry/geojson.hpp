#pragma once

#include "geoqa/geometry/geometry.hpp"

#include <nlohmann/json.hpp>

namespace geoqa {

/// RFC 7946 geometry object -> Geometry. Point, LineString, Polygon and
/// MultiPolygon are supported; rings are closed if left open. Throws
/// Error(UnsupportedKind) for other types and Error(InvalidArgument) for
/// malformed coordinates.
Geometry geometry_from_geojson(const nlohmann::json& j);

nlohmann::json to_geojson(const Geometry& geometry);

}  // namespace geoqa
