#include "geoqa/geometry/geometry.hpp"

#include "geoqa/error.hpp"

#include <algorithm>
#include <cmath>

namespace geoqa {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::optional<std::string> check_coord(const LonLat& c) {
    if (!std::isfinite(c.lon) || !std::isfinite(c.lat)) {
        return "non-finite coordinate";
    }
    if (c.lon < -180.0 || c.lon > 180.0) {
        return "longitude out of range [-180, 180]";
    }
    if (c.lat < -90.0 || c.lat > 90.0) {
        return "latitude out of range [-90, 90]";
    }
    return std::nullopt;
}

std::optional<std::string> check_ring(const Ring& ring) {
    if (ring.size() < 4) {
        return "polygon ring needs at least 4 positions";
    }
    if (!(ring.front() == ring.back())) {
        return "polygon ring is not closed";
    }
    for (const auto& c : ring) {
        if (auto err = check_coord(c)) {
            return err;
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_polygon(const Polygon& p) {
    if (p.rings.empty()) {
        return "polygon has no rings";
    }
    for (const auto& r : p.rings) {
        if (auto err = check_ring(r)) {
            return err;
        }
    }
    return std::nullopt;
}

BoundingBox compute_bbox(const std::vector<LonLat>& pts) {
    BoundingBox b{90.0, -90.0, 180.0, -180.0};
    for (const auto& c : pts) {
        b.min_lat = std::min(b.min_lat, c.lat);
        b.max_lat = std::max(b.max_lat, c.lat);
        b.min_lon = std::min(b.min_lon, c.lon);
        b.max_lon = std::max(b.max_lon, c.lon);
    }
    return b;
}

}  // namespace

std::string_view to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Point: return "POINT";
        case GeometryKind::LineString: return "LINESTRING";
        case GeometryKind::Polygon: return "POLYGON";
        case GeometryKind::MultiPolygon: return "MULTIPOLYGON";
    }
    return "UNKNOWN";
}

std::optional<std::string> Geometry::validate(const Shape& shape) {
    return std::visit(
        Overloaded{
            [](const Point& p) { return check_coord(p.coord); },
            [](const LineString& l) -> std::optional<std::string> {
                if (l.coords.size() < 2) {
                    return "linestring needs at least 2 positions";
                }
                for (const auto& c : l.coords) {
                    if (auto err = check_coord(c)) {
                        return err;
                    }
                }
                return std::nullopt;
            },
            [](const Polygon& p) { return check_polygon(p); },
            [](const MultiPolygon& m) -> std::optional<std::string> {
                if (m.polygons.empty()) {
                    return "multipolygon has no polygons";
                }
                for (const auto& p : m.polygons) {
                    if (auto err = check_polygon(p)) {
                        return err;
                    }
                }
                return std::nullopt;
            },
        },
        shape);
}

Geometry::Geometry(Shape shape, std::string source_wkt) {
    if (auto err = validate(shape)) {
        throw Error(ErrorCode::InvalidArgument, *err);
    }
    auto data = std::make_shared<Data>(Data{std::move(shape), std::move(source_wkt), {}});
    data_ = data;
    data->bbox = compute_bbox(vertices());
}

Geometry Geometry::point(double lon, double lat) { return Geometry(Point{{lon, lat}}); }

Geometry Geometry::polygon(std::vector<LonLat> shell) {
    if (!shell.empty() && !(shell.front() == shell.back())) {
        shell.push_back(shell.front());
    }
    return Geometry(Polygon{{std::move(shell)}});
}

Geometry Geometry::box(const BoundingBox& b) {
    return polygon({{b.min_lon, b.min_lat}, {b.max_lon, b.min_lat}, {b.max_lon, b.max_lat}, {b.min_lon, b.max_lat}});
}

GeometryKind Geometry::kind() const noexcept {
    return static_cast<GeometryKind>(data_->shape.index());
}

bool Geometry::is_polygonal() const noexcept {
    const auto k = kind();
    return k == GeometryKind::Polygon || k == GeometryKind::MultiPolygon;
}

std::vector<LonLat> Geometry::vertices() const {
    std::vector<LonLat> out;
    std::visit(Overloaded{
                   [&](const Point& p) { out.push_back(p.coord); },
                   [&](const LineString& l) { out = l.coords; },
                   [&](const Polygon& p) {
                       for (const auto& r : p.rings) {
                           out.insert(out.end(), r.begin(), r.end());
                       }
                   },
                   [&](const MultiPolygon& m) {
                       for (const auto& p : m.polygons) {
                           for (const auto& r : p.rings) {
                               out.insert(out.end(), r.begin(), r.end());
                           }
                       }
                   },
               },
               data_->shape);
    return out;
}

bool operator==(const Geometry& a, const Geometry& b) {
    if (a.kind() != b.kind()) {
        return false;
    }
    return std::visit(
        Overloaded{
            [&](const Point& p) { return p.coord == std::get<Point>(b.shape()).coord; },
            [&](const LineString& l) { return l.coords == std::get<LineString>(b.shape()).coords; },
            [&](const Polygon& p) { return p.rings == std::get<Polygon>(b.shape()).rings; },
            [&](const MultiPolygon& m) {
                const auto& other = std::get<MultiPolygon>(b.shape()).polygons;
                if (m.polygons.size() != other.size()) {
                    return false;
                }
                for (std::size_t i = 0; i < other.size(); ++i) {
                    if (m.polygons[i].rings != other[i].rings) {
                        return false;
                    }
                }
                return true;
            },
        },
        a.shape());
}

}  // namespace geoqa
