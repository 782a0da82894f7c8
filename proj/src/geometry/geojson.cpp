#include "geoqa/geometry/geojson.hpp"

#include "geoqa/error.hpp"

namespace geoqa {

namespace {

LonLat position(const nlohmann::json& j) {
    if (!j.is_array() || j.size() < 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::InvalidArgument, "position must be [lon, lat]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<LonLat> positions(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidArgument, "expected an array of positions");
    }
    std::vector<LonLat> out;
    out.reserve(j.size());
    for (const auto& p : j) {
        out.push_back(position(p));
    }
    return out;
}

Polygon polygon(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::InvalidArgument, "polygon needs at least one ring");
    }
    Polygon poly;
    for (const auto& r : j) {
        Ring ring = positions(r);
        if (!ring.empty() && !(ring.front() == ring.back())) {
            ring.push_back(ring.front());
        }
        poly.rings.push_back(std::move(ring));
    }
    return poly;
}

nlohmann::json coords(const std::vector<LonLat>& pts) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : pts) {
        a.push_back({p.lon, p.lat});
    }
    return a;
}

nlohmann::json coords(const Polygon& p) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : p.rings) {
        a.push_back(coords(r));
    }
    return a;
}

}  // namespace

Geometry geometry_from_geojson(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "geometry must be an object with a type");
    }
    const std::string type = j["type"].get<std::string>();
    if (!j.contains("coordinates")) {
        throw Error(ErrorCode::InvalidArgument, type + " without coordinates");
    }
    const auto& c = j["coordinates"];
    if (type == "Point") {
        return Geometry(Point{position(c)});
    }
    if (type == "LineString") {
        return Geometry(LineString{positions(c)});
    }
    if (type == "Polygon") {
        return Geometry(polygon(c));
    }
    if (type == "MultiPolygon") {
        MultiPolygon mp;
        if (!c.is_array() || c.empty()) {
            throw Error(ErrorCode::InvalidArgument, "MultiPolygon needs at least one polygon");
        }
        for (const auto& p : c) {
            mp.polygons.push_back(polygon(p));
        }
        return Geometry(std::move(mp));
    }
    throw Error(ErrorCode::UnsupportedKind, "unsupported GeoJSON geometry type " + type);
}

nlohmann::json to_geojson(const Geometry& geometry) {
    return std::visit(
        [](const auto& s) -> nlohmann::json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Point>) {
                return {{"type", "Point"}, {"coordinates", {s.coord.lon, s.coord.lat}}};
            } else if constexpr (std::is_same_v<T, LineString>) {
                return {{"type", "LineString"}, {"coordinates", coords(s.coords)}};
            } else if constexpr (std::is_same_v<T, Polygon>) {
                return {{"type", "Polygon"}, {"coordinates", coords(s)}};
            } else {
                nlohmann::json a = nlohmann::json::array();
                for (const auto& p : s.polygons) {
                    a.push_back(coords(p));
                }
                return {{"type", "MultiPolygon"}, {"coordinates", a}};
            }
        },
        geometry.shape());
}

}  // namespace geoqa
