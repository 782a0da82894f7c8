#pragma once

#include "geoqa/geometry/bounding_box.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geoqa {

struct LonLat {
    double lon = 0.0;
    double lat = 0.0;

    friend bool operator==(const LonLat&, const LonLat&) = default;
};

using Ring = std::vector<LonLat>;

struct Point {
    LonLat coord;
};

struct LineString {
    std::vector<LonLat> coords;
};

/// rings[0] is the shell; further rings are holes. Every ring is closed.
struct Polygon {
    std::vector<Ring> rings;
};

struct MultiPolygon {
    std::vector<Polygon> polygons;
};

enum class GeometryKind { Point, LineString, Polygon, MultiPolygon };

std::string_view to_string(GeometryKind kind);

/// Immutable shape with lon/lat coordinates. Copies share the underlying
/// coordinate storage.
class Geometry {
public:
    using Shape = std::variant<Point, LineString, Polygon, MultiPolygon>;

    /// Validates ranges, ring closure and minimum vertex counts; throws
    /// Error(InvalidArgument) with a description of the first violation.
    explicit Geometry(Shape shape, std::string source_wkt = {});

    static Geometry point(double lon, double lat);
    /// Closed ring built from an open or closed vertex list.
    static Geometry polygon(std::vector<LonLat> shell);
    static Geometry box(const BoundingBox& box);

    GeometryKind kind() const noexcept;
    const Shape& shape() const noexcept { return data_->shape; }
    /// The text this geometry was parsed from, empty if built in code.
    const std::string& source_wkt() const noexcept { return data_->source_wkt; }
    const BoundingBox& bbox() const noexcept { return data_->bbox; }

    bool is_polygonal() const noexcept;

    /// Flat view of every vertex in the shape.
    std::vector<LonLat> vertices() const;

    /// Returns a description of the first invariant violation, if any.
    static std::optional<std::string> validate(const Shape& shape);

    /// Exact coordinate equality of the shapes (ignores source text).
    friend bool operator==(const Geometry& a, const Geometry& b);

private:
    struct Data {
        Shape shape;
        std::string source_wkt;
        BoundingBox bbox;
    };
    std::shared_ptr<const Data> data_;
};

}  // namespace geoqa
