#include "geoqa/geometry/measure.hpp"

#include "geoqa/geometry/predicates.hpp"
#include "planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace geoqa {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double hav(double theta) {
    const double s = std::sin(theta / 2.0);
    return s * s;
}

double arc_to_m(double h) { return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h))); }

double point_segment_m(const LonLat& p, const planar::Segment& s) {
    const double k = std::cos(p.lat * kDegToRad);
    const double ax = (s.a.lon - p.lon) * k;
    const double ay = s.a.lat - p.lat;
    const double bx = (s.b.lon - p.lon) * k;
    const double by = s.b.lat - p.lat;
    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = std::clamp(-(ax * dx + ay * dy) / len2, 0.0, 1.0);
    }
    return haversine_m(p, planar::lerp(s, t));
}

double ring_area_deg2(const Ring& ring, double k) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        sum += ring[i].lon * k * ring[i + 1].lat - ring[i + 1].lon * k * ring[i].lat;
    }
    return std::abs(sum) / 2.0;
}

double polygon_area_deg2(const Polygon& p, double k) {
    double area = ring_area_deg2(p.rings.front(), k);
    for (std::size_t i = 1; i < p.rings.size(); ++i) {
        area -= ring_area_deg2(p.rings[i], k);
    }
    return std::max(0.0, area);
}

}  // namespace

double haversine_m(const LonLat& a, const LonLat& b) {
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double h = hav(phi2 - phi1) + std::cos(phi1) * std::cos(phi2) * hav((b.lon - a.lon) * kDegToRad);
    return arc_to_m(h);
}

double distance_m(const Geometry& a, const Geometry& b) {
    if (intersects(a, b)) {
        return 0.0;
    }
    const auto a_segs = planar::segments(a);
    const auto b_segs = planar::segments(b);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : a.vertices()) {
        for (const auto& s : b_segs) {
            best = std::min(best, point_segment_m(v, s));
        }
    }
    for (const auto& v : b.vertices()) {
        for (const auto& s : a_segs) {
            best = std::min(best, point_segment_m(v, s));
        }
    }
    return best;
}

double distance_lower_bound_m(const BoundingBox& a, const BoundingBox& b) {
    const double dlat = std::max({0.0, b.min_lat - a.max_lat, a.min_lat - b.max_lat});
    const double dlon = std::max({0.0, b.min_lon - a.max_lon, a.min_lon - b.max_lon});
    if (dlat == 0.0 && dlon == 0.0) {
        return 0.0;
    }
    const double phi_max = std::max({std::abs(a.min_lat), std::abs(a.max_lat), std::abs(b.min_lat), std::abs(b.max_lat)});
    const double c = std::cos(phi_max * kDegToRad);
    // Shaved slightly so rounding never lifts the bound above the true distance.
    return arc_to_m(hav(dlat * kDegToRad) + c * c * hav(dlon * kDegToRad)) * (1.0 - 1e-9);
}

double area_m2(const Geometry& g) {
    if (!g.is_polygonal()) {
        return 0.0;
    }
    const auto& box = g.bbox();
    const double mid_lat = 0.5 * (box.min_lat + box.max_lat);
    const double k = std::cos(mid_lat * kDegToRad);
    constexpr double kMPerDeg = kEarthRadiusM * kDegToRad;
    double deg2 = 0.0;
    if (const auto* p = std::get_if<Polygon>(&g.shape())) {
        deg2 = polygon_area_deg2(*p, k);
    } else {
        for (const auto& p : std::get<MultiPolygon>(g.shape()).polygons) {
            deg2 += polygon_area_deg2(p, k);
        }
    }
    return deg2 * kMPerDeg * kMPerDeg;
}

}  // namespace geoqa
