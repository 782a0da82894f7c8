#pragma once

// Seeded random geometry sets for predicate/oracle comparisons. Shapes
// cluster in a few km around Munich so every relation type fires often:
// stars nest inside larger stars, lines cross polygons, points fall inside.

#include "geoqa/geometry/geo_set.hpp"
#include "geoqa/geometry/predicates.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace randgeo {

using namespace geoqa;

inline Geometry star(std::mt19937& rng, double cx, double cy, double r) {
    std::uniform_real_distribution<double> rad(0.4 * r, r);
    const int n = std::uniform_int_distribution<int>(3, 8)(rng);
    std::vector<LonLat> shell;
    for (int i = 0; i < n; ++i) {
        const double t = 2 * std::numbers::pi * i / n;
        const double rr = rad(rng);
        shell.push_back({cx + rr * std::cos(t), cy + rr * std::sin(t)});
    }
    return Geometry::polygon(shell);
}

inline Geometry shape(std::mt19937& rng) {
    std::uniform_real_distribution<double> lon(11.54, 11.60), lat(48.13, 48.17);
    std::uniform_real_distribution<double> size(0.0003, 0.006);
    const double x = lon(rng);
    const double y = lat(rng);
    switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: return Geometry::point(x, y);
        case 1: {
            const double s = size(rng);
            return Geometry(LineString{{{x, y}, {x + s, y + s / 2}, {x + 2 * s, y - s / 3}}});
        }
        case 2: return Geometry::box(BoundingBox::checked(y, y + size(rng), x, x + size(rng)));
        default: return star(rng, x, y, size(rng));
    }
}

/// `n` geometries keyed "<prefix>_kind_<i>"; a share of them is built
/// inside or around shapes of `near` so contains/within cases occur.
inline GeoSet make_set(std::mt19937& rng, std::size_t n, const std::string& prefix, const GeoSet* near = nullptr) {
    GeoSet out;
    for (std::size_t i = 0; out.size() < n; ++i) {
        Geometry g = shape(rng);
        if (near && !near->empty() && std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
            const auto& b = (*near)[rng() % near->size()].geometry.bbox();
            const double cx = (b.min_lon + b.max_lon) / 2;
            const double cy = (b.min_lat + b.max_lat) / 2;
            const double r = std::max(b.lon_extent(), b.lat_extent());
            if (rng() % 2 && r > 0) {
                g = star(rng, cx, cy, r * 0.2);  // likely inside
            } else {
                g = star(rng, cx, cy, r * 3 + 0.0005);  // likely around
            }
        }
        out.insert(EntityKey{prefix, "shape", "", std::to_string(i)}, g);
    }
    return out;
}

inline SpatialOpSpec spec(std::mt19937& rng) {
    SpatialOpSpec s;
    s.spatial_type = static_cast<SpatialType>(rng() % 4);
    if (s.spatial_type == SpatialType::Buffer) {
        const double choices[] = {10, 100, 250, 1000, 3000};
        s.num = choices[rng() % 5];
    }
    s.negation = rng() % 2;
    return s;
}

}  // namespace randgeo
