#include "geoqa/geometry/bounding_box.hpp"

#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace geoqa {

namespace {

constexpr double kMetersPerDegreeLat = 110574.0;
constexpr double kMetersPerDegreeLonEquator = 111320.0;
constexpr double kPruneInflation = 1.05;

}  // namespace

BoundingBox BoundingBox::checked(double min_lat, double max_lat, double min_lon, double max_lon) {
    BoundingBox box{min_lat, max_lat, min_lon, max_lon};
    if (!box.valid()) {
        throw Error(ErrorCode::InvalidArgument,
                    "invalid bounding box [" + text::format_number(min_lat) + ", " +
                        text::format_number(max_lat) + ", " + text::format_number(min_lon) + ", " +
                        text::format_number(max_lon) + "]");
    }
    return box;
}

BoundingBox BoundingBox::world() { return BoundingBox{-90.0, 90.0, -180.0, 180.0}; }

bool BoundingBox::valid() const noexcept {
    auto finite = [](double v) { return std::isfinite(v); };
    return finite(min_lat) && finite(max_lat) && finite(min_lon) && finite(max_lon) &&
           min_lat <= max_lat && min_lon <= max_lon && min_lat >= -90.0 && max_lat <= 90.0 &&
           min_lon >= -180.0 && max_lon <= 180.0;
}

bool BoundingBox::intersects(const BoundingBox& o) const noexcept {
    return min_lat <= o.max_lat && o.min_lat <= max_lat && min_lon <= o.max_lon && o.min_lon <= max_lon;
}

bool BoundingBox::contains(const BoundingBox& o) const noexcept {
    return min_lat <= o.min_lat && o.max_lat <= max_lat && min_lon <= o.min_lon && o.max_lon <= max_lon;
}

bool BoundingBox::contains_point(double lon, double lat) const noexcept {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
}

BoundingBox BoundingBox::merged(const BoundingBox& o) const noexcept {
    return BoundingBox{std::min(min_lat, o.min_lat), std::max(max_lat, o.max_lat),
                       std::min(min_lon, o.min_lon), std::max(max_lon, o.max_lon)};
}

BoundingBox BoundingBox::expanded_by_meters(double meters) const noexcept {
    const double margin = meters * kPruneInflation;
    const double dlat = margin / kMetersPerDegreeLat;
    // Longitude degrees shrink towards the poles; use the latitude of the box
    // edge (after growth) closest to a pole.
    const double extreme_lat = std::min(89.999, std::max(std::abs(min_lat - dlat), std::abs(max_lat + dlat)));
    const double cos_lat = std::cos(extreme_lat * std::numbers::pi / 180.0);
    const double dlon = margin / (kMetersPerDegreeLonEquator * cos_lat);
    BoundingBox out{min_lat - dlat, max_lat + dlat, min_lon - dlon, max_lon + dlon};
    out.min_lat = std::max(-90.0, out.min_lat);
    out.max_lat = std::min(90.0, out.max_lat);
    out.min_lon = std::max(-180.0, out.min_lon);
    out.max_lon = std::min(180.0, out.max_lon);
    return out;
}

std::string BoundingBox::to_wkt() const {
    const std::string x0 = text::format_number(min_lon);
    const std::string x1 = text::format_number(max_lon);
    const std::string y0 = text::format_number(min_lat);
    const std::string y1 = text::format_number(max_lat);
    return "POLYGON ((" + x0 + " " + y0 + ", " + x1 + " " + y0 + ", " + x1 + " " + y1 + ", " + x0 + " " +
           y1 + ", " + x0 + " " + y0 + "))";
}

nlohmann::json BoundingBox::to_json() const { return nlohmann::json::array({min_lat, max_lat, min_lon, max_lon}); }

BoundingBox BoundingBox::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, "bounding box must be a 4-element array");
    }
    auto num = [](const nlohmann::json& v) {
        if (v.is_number()) {
            return v.get<double>();
        }
        if (v.is_string()) {
            // Geocoders commonly return the bounds as decimal strings.
            try {
                return std::stod(v.get<std::string>());
            } catch (const std::exception&) {
            }
        }
        throw Error(ErrorCode::InvalidArgument, "bounding box element is not numeric");
    };
    return checked(num(j[0]), num(j[1]), num(j[2]), num(j[3]));
}

}  // namespace geoqa
