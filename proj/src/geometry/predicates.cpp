#include "geoqa/geometry/predicates.hpp"

#include "geoqa/error.hpp"
#include "geoqa/geometry/measure.hpp"
#include "geoqa/text.hpp"
#include "planar.hpp"

namespace geoqa {

using planar::Location;
using planar::Segment;

namespace {

std::vector<Polygon> polygons_of(const Geometry& g) {
    if (const auto* p = std::get_if<Polygon>(&g.shape())) {
        return {*p};
    }
    return std::get<MultiPolygon>(g.shape()).polygons;
}

// Every vertex and every piece midpoint of `segs`, after splitting them at
// the edges of `cut`.
template <class Visit>
bool for_each_sample(const std::vector<Segment>& segs, const std::vector<Segment>& cut, Visit&& visit) {
    for (const auto& s : segs) {
        const auto ts = planar::split_params(s, cut);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (!visit(planar::lerp(s, ts[i]))) {
                return false;
            }
            if (i + 1 < ts.size() && !visit(planar::lerp(s, 0.5 * (ts[i] + ts[i + 1])))) {
                return false;
            }
        }
    }
    return true;
}

// All samples of b's edges lie in the closure of a; reports whether one
// of them hit a's interior.
bool edges_covered(const Geometry& a, const std::vector<Segment>& a_segs, const std::vector<Segment>& b_segs,
                   bool& hit_interior) {
    return for_each_sample(b_segs, a_segs, [&](const LonLat& p) {
        const Location loc = planar::locate(p, a);
        if (loc == Location::Exterior) {
            return false;
        }
        hit_interior = hit_interior || loc == Location::Interior;
        return true;
    });
}

bool polygonal_contains(const Geometry& a, const Geometry& b) {
    const auto a_segs = planar::segments(a);
    const auto b_segs = planar::segments(b);
    bool hit_interior = false;
    if (b.kind() == GeometryKind::Point) {
        return planar::locate(std::get<Point>(b.shape()).coord, a) == Location::Interior;
    }
    if (!edges_covered(a, a_segs, b_segs, hit_interior)) {
        return false;
    }
    if (b.kind() == GeometryKind::LineString) {
        return hit_interior;
    }
    // A hole (or separate piece) of a sitting inside b breaks containment.
    const bool boundary_outside_b = for_each_sample(a_segs, b_segs, [&](const LonLat& p) {
        return planar::locate(p, b) != Location::Interior;
    });
    if (!boundary_outside_b) {
        return false;
    }
    for (const auto& poly : polygons_of(b)) {
        if (planar::locate(planar::interior_point(poly), a) != Location::Interior) {
            return false;
        }
    }
    return true;
}

bool line_contains(const Geometry& a, const Geometry& b) {
    if (b.kind() == GeometryKind::Point) {
        return planar::locate(std::get<Point>(b.shape()).coord, a) == Location::Interior;
    }
    if (b.kind() != GeometryKind::LineString) {
        return false;
    }
    bool hit_interior = false;
    return edges_covered(a, planar::segments(a), planar::segments(b), hit_interior) && hit_interior;
}

}  // namespace

std::string_view to_string(SpatialType type) {
    switch (type) {
        case SpatialType::Buffer: return "buffer";
        case SpatialType::Intersects: return "intersects";
        case SpatialType::Contains: return "contains";
        case SpatialType::Within: return "within";
    }
    return "unknown";
}

SpatialType parse_spatial_type(std::string_view name) {
    const std::string n = text::to_lower(name);
    if (n == "buffer") return SpatialType::Buffer;
    if (n == "intersects") return SpatialType::Intersects;
    if (n == "contains") return SpatialType::Contains;
    if (n == "within") return SpatialType::Within;
    throw Error(ErrorCode::InvalidArgument, "unknown spatial_type '" + std::string(name) + "'");
}

bool intersects(const Geometry& a, const Geometry& b) {
    if (!a.bbox().intersects(b.bbox())) {
        return false;
    }
    const auto a_segs = planar::segments(a);
    const auto b_segs = planar::segments(b);
    for (const auto& s : a_segs) {
        for (const auto& t : b_segs) {
            if (planar::segments_intersect(s, t)) {
                return true;
            }
        }
    }
    // No boundary contact: one must lie wholly inside the other.
    if (b.is_polygonal()) {
        for (const auto& p : planar::component_anchors(a)) {
            if (planar::locate(p, b) != Location::Exterior) {
                return true;
            }
        }
    }
    if (a.is_polygonal()) {
        for (const auto& p : planar::component_anchors(b)) {
            if (planar::locate(p, a) != Location::Exterior) {
                return true;
            }
        }
    }
    return false;
}

bool contains(const Geometry& a, const Geometry& b) {
    if (!a.bbox().contains(b.bbox())) {
        return false;
    }
    switch (a.kind()) {
        case GeometryKind::Point:
            return b.kind() == GeometryKind::Point && planar::locate(std::get<Point>(b.shape()).coord, a) == Location::Interior;
        case GeometryKind::LineString:
            return line_contains(a, b);
        case GeometryKind::Polygon:
        case GeometryKind::MultiPolygon:
            return polygonal_contains(a, b);
    }
    return false;
}

bool within(const Geometry& a, const Geometry& b) { return contains(b, a); }

bool relate(const Geometry& subject, const Geometry& object, const SpatialOpSpec& spec) {
    bool result = false;
    switch (spec.spatial_type) {
        case SpatialType::Buffer:
            if (!spec.num) {
                throw Error(ErrorCode::MissingDistance, "buffer relation requires num");
            }
            result = distance_lower_bound_m(subject.bbox(), object.bbox()) <= *spec.num &&
                     distance_m(subject, object) <= *spec.num;
            break;
        case SpatialType::Intersects: result = intersects(subject, object); break;
        case SpatialType::Contains: result = contains(subject, object); break;
        case SpatialType::Within: result = within(subject, object); break;
    }
    return spec.negation ? !result : result;
}

}  // namespace geoqa
