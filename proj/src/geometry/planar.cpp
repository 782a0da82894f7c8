#include "planar.hpp"

#include "geoqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace geoqa::planar {

namespace {

double seg_len(const Segment& s) { return std::hypot(s.b.lon - s.a.lon, s.b.lat - s.a.lat); }

bool same_point(const LonLat& p, const LonLat& q) {
    return std::abs(p.lon - q.lon) <= kOnSegmentTolerance && std::abs(p.lat - q.lat) <= kOnSegmentTolerance;
}

void ring_segments(const Ring& ring, std::vector<Segment>& out) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        out.push_back({ring[i], ring[i + 1]});
    }
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

double cross(const LonLat& o, const LonLat& a, const LonLat& b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

LonLat lerp(const Segment& s, double t) {
    return {s.a.lon + (s.b.lon - s.a.lon) * t, s.a.lat + (s.b.lat - s.a.lat) * t};
}

bool on_segment(const LonLat& p, const Segment& s) {
    const double len = seg_len(s);
    if (len <= kOnSegmentTolerance) {
        return same_point(p, s.a);
    }
    const double along = ((p.lon - s.a.lon) * (s.b.lon - s.a.lon) + (p.lat - s.a.lat) * (s.b.lat - s.a.lat)) / len;
    if (along < -kOnSegmentTolerance || along > len + kOnSegmentTolerance) {
        return false;
    }
    return std::abs(cross(s.a, s.b, p)) / len <= kOnSegmentTolerance;
}

bool segments_intersect(const Segment& s, const Segment& t) {
    if (std::max(s.a.lon, s.b.lon) + kOnSegmentTolerance < std::min(t.a.lon, t.b.lon) ||
        std::max(t.a.lon, t.b.lon) + kOnSegmentTolerance < std::min(s.a.lon, s.b.lon) ||
        std::max(s.a.lat, s.b.lat) + kOnSegmentTolerance < std::min(t.a.lat, t.b.lat) ||
        std::max(t.a.lat, t.b.lat) + kOnSegmentTolerance < std::min(s.a.lat, s.b.lat)) {
        return false;
    }
    const int d1 = sign(cross(t.a, t.b, s.a));
    const int d2 = sign(cross(t.a, t.b, s.b));
    const int d3 = sign(cross(s.a, s.b, t.a));
    const int d4 = sign(cross(s.a, s.b, t.b));
    if (d1 * d2 < 0 && d3 * d4 < 0) {
        return true;
    }
    return on_segment(s.a, t) || on_segment(s.b, t) || on_segment(t.a, s) || on_segment(t.b, s);
}

Location locate_in_ring(const LonLat& p, const Ring& ring) {
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const LonLat& a = ring[i];
        const LonLat& b = ring[i + 1];
        if (on_segment(p, {a, b})) {
            return Location::Boundary;
        }
        if ((a.lat > p.lat) != (b.lat > p.lat)) {
            const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
            if (p.lon < x) {
                inside = !inside;
            }
        }
    }
    return inside ? Location::Interior : Location::Exterior;
}

Location locate_in_polygon(const LonLat& p, const Polygon& polygon) {
    const Location shell = locate_in_ring(p, polygon.rings.front());
    if (shell != Location::Interior) {
        return shell;
    }
    for (std::size_t i = 1; i < polygon.rings.size(); ++i) {
        const Location hole = locate_in_ring(p, polygon.rings[i]);
        if (hole == Location::Interior) {
            return Location::Exterior;
        }
        if (hole == Location::Boundary) {
            return Location::Boundary;
        }
    }
    return Location::Interior;
}

Location locate(const LonLat& p, const Geometry& g) {
    const auto& shape = g.shape();
    if (const auto* pt = std::get_if<Point>(&shape)) {
        return same_point(p, pt->coord) ? Location::Interior : Location::Exterior;
    }
    if (const auto* line = std::get_if<LineString>(&shape)) {
        const auto& c = line->coords;
        bool on = false;
        for (std::size_t i = 0; i + 1 < c.size(); ++i) {
            if (on_segment(p, {c[i], c[i + 1]})) {
                on = true;
                break;
            }
        }
        if (!on) {
            return Location::Exterior;
        }
        const bool closed = c.front() == c.back();
        if (!closed && (same_point(p, c.front()) || same_point(p, c.back()))) {
            return Location::Boundary;
        }
        return Location::Interior;
    }
    if (const auto* poly = std::get_if<Polygon>(&shape)) {
        return locate_in_polygon(p, *poly);
    }
    Location best = Location::Exterior;
    for (const auto& poly : std::get<MultiPolygon>(shape).polygons) {
        const Location loc = locate_in_polygon(p, poly);
        if (loc == Location::Interior) {
            return loc;
        }
        if (loc == Location::Boundary) {
            best = loc;
        }
    }
    return best;
}

std::vector<Segment> segments(const Geometry& g) {
    std::vector<Segment> out;
    const auto& shape = g.shape();
    if (const auto* pt = std::get_if<Point>(&shape)) {
        out.push_back({pt->coord, pt->coord});
    } else if (const auto* line = std::get_if<LineString>(&shape)) {
        ring_segments(line->coords, out);
    } else if (const auto* poly = std::get_if<Polygon>(&shape)) {
        for (const auto& r : poly->rings) {
            ring_segments(r, out);
        }
    } else {
        for (const auto& p : std::get<MultiPolygon>(shape).polygons) {
            for (const auto& r : p.rings) {
                ring_segments(r, out);
            }
        }
    }
    return out;
}

std::vector<LonLat> component_anchors(const Geometry& g) {
    const auto& shape = g.shape();
    if (const auto* pt = std::get_if<Point>(&shape)) {
        return {pt->coord};
    }
    if (const auto* line = std::get_if<LineString>(&shape)) {
        return {line->coords.front()};
    }
    if (const auto* poly = std::get_if<Polygon>(&shape)) {
        return {poly->rings.front().front()};
    }
    std::vector<LonLat> out;
    for (const auto& p : std::get<MultiPolygon>(shape).polygons) {
        out.push_back(p.rings.front().front());
    }
    return out;
}

std::vector<double> split_params(const Segment& s, const std::vector<Segment>& others) {
    std::vector<double> ts{0.0, 1.0};
    const double rx = s.b.lon - s.a.lon;
    const double ry = s.b.lat - s.a.lat;
    const double len2 = rx * rx + ry * ry;
    if (len2 == 0.0) {
        return ts;
    }
    auto project = [&](const LonLat& p) {
        return ((p.lon - s.a.lon) * rx + (p.lat - s.a.lat) * ry) / len2;
    };
    const double smin_lon = std::min(s.a.lon, s.b.lon) - kOnSegmentTolerance;
    const double smax_lon = std::max(s.a.lon, s.b.lon) + kOnSegmentTolerance;
    const double smin_lat = std::min(s.a.lat, s.b.lat) - kOnSegmentTolerance;
    const double smax_lat = std::max(s.a.lat, s.b.lat) + kOnSegmentTolerance;
    for (const auto& o : others) {
        if (std::max(o.a.lon, o.b.lon) < smin_lon || std::min(o.a.lon, o.b.lon) > smax_lon ||
            std::max(o.a.lat, o.b.lat) < smin_lat || std::min(o.a.lat, o.b.lat) > smax_lat) {
            continue;
        }
        // Endpoints of `o` touching `s` (covers collinear overlap and T-junctions).
        for (const LonLat& p : {o.a, o.b}) {
            if (on_segment(p, s)) {
                ts.push_back(std::clamp(project(p), 0.0, 1.0));
            }
        }
        const double qx = o.b.lon - o.a.lon;
        const double qy = o.b.lat - o.a.lat;
        const double denom = rx * qy - ry * qx;
        if (denom == 0.0) {
            continue;
        }
        const double wx = o.a.lon - s.a.lon;
        const double wy = o.a.lat - s.a.lat;
        const double t = (wx * qy - wy * qx) / denom;
        const double u = (wx * ry - wy * rx) / denom;
        if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) {
            ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts) {
        if (out.empty() || t - out.back() > 1e-12) {
            out.push_back(t);
        }
    }
    if (out.back() != 1.0) {
        out.back() = 1.0;
    }
    return out;
}

LonLat interior_point(const Polygon& polygon) {
    std::vector<double> lats;
    for (const auto& r : polygon.rings) {
        for (const auto& c : r) {
            lats.push_back(c.lat);
        }
    }
    std::sort(lats.begin(), lats.end());
    lats.erase(std::unique(lats.begin(), lats.end()), lats.end());

    // Scan lines between consecutive distinct vertex latitudes, widest gap
    // first, so no scan line passes through a vertex.
    std::vector<std::pair<double, double>> gaps;
    for (std::size_t i = 0; i + 1 < lats.size(); ++i) {
        gaps.emplace_back(lats[i + 1] - lats[i], 0.5 * (lats[i] + lats[i + 1]));
    }
    std::sort(gaps.begin(), gaps.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

    for (const auto& [width, y] : gaps) {
        std::vector<double> xs;
        for (const auto& r : polygon.rings) {
            for (std::size_t i = 0; i + 1 < r.size(); ++i) {
                const LonLat& a = r[i];
                const LonLat& b = r[i + 1];
                if ((a.lat > y) != (b.lat > y)) {
                    xs.push_back(a.lon + (y - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
                }
            }
        }
        std::sort(xs.begin(), xs.end());
        double best_width = 0.0;
        double best_x = 0.0;
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            if (xs[i + 1] - xs[i] > best_width) {
                best_width = xs[i + 1] - xs[i];
                best_x = 0.5 * (xs[i] + xs[i + 1]);
            }
        }
        if (best_width > 0.0) {
            LonLat p{best_x, y};
            if (locate_in_polygon(p, polygon) == Location::Interior) {
                return p;
            }
        }
    }
    // Zero-area polygon: fall back to the first vertex.
    return polygon.rings.front().front();
}

}  // namespace geoqa::planar
