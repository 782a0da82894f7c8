#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace geoqa {

/// Axis-aligned lon/lat rectangle in WGS84 degrees. Serialized as
/// [min_lat, max_lat, min_lon, max_lon].
struct BoundingBox {
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    /// Validating constructor; throws Error(InvalidArgument) on inverted or
    /// out-of-range bounds.
    static BoundingBox checked(double min_lat, double max_lat, double min_lon, double max_lon);
    static BoundingBox world();

    bool valid() const noexcept;
    bool intersects(const BoundingBox& other) const noexcept;
    bool contains(const BoundingBox& other) const noexcept;
    bool contains_point(double lon, double lat) const noexcept;

    double lat_extent() const noexcept { return max_lat - min_lat; }
    double lon_extent() const noexcept { return max_lon - min_lon; }

    /// Smallest box covering both.
    BoundingBox merged(const BoundingBox& other) const noexcept;

    /// Box grown by a metric margin on every side, using 110,574 m per degree
    /// of latitude and 111,320 m * cos(lat) per degree of longitude, inflated
    /// by 5%. Clamped to WGS84 ranges.
    BoundingBox expanded_by_meters(double meters) const noexcept;

    /// Closed POLYGON ring around the box, counter-clockwise from (min_lon, min_lat).
    std::string to_wkt() const;

    nlohmann::json to_json() const;
    static BoundingBox from_json(const nlohmann::json& j);

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

}  // namespace geoqa
