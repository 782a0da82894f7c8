#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/geometry/bounding_box.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace geoqa::region {

enum class Cut { North, South, East, West, Central };

std::string_view to_string(Cut cut);

struct Directive {
    std::string place;
    std::optional<Cut> cut;
    std::optional<double> scale;

    /// Reads the BboxModifier answer {place, modification, scale}. Throws
    /// Error(MalformedDirective) for an empty place, an unknown modification,
    /// or expand/shrink without a fitting factor.
    static Directive from_agent_json(const nlohmann::json& j);
};

struct GeocodeResult {
    BoundingBox box;
    std::string display_name;
};

class Geocoder {
public:
    virtual ~Geocoder() = default;
    /// Throws Error(PlaceNotFound) or Error(GeocoderUnavailable).
    virtual GeocodeResult geocode(const std::string& place) = 0;
};

/// Offline geocoder. Fixture: {"places": {"<name>": {"boundingbox":
/// [min_lat, max_lat, min_lon, max_lon], "display_name": "..."}}}; names
/// match case-insensitively after whitespace collapse.
class FixtureGeocoder : public Geocoder {
public:
    explicit FixtureGeocoder(const nlohmann::json& fixture);
    static FixtureGeocoder load(const std::filesystem::path& file);
    GeocodeResult geocode(const std::string& place) override;

private:
    std::map<std::string, GeocodeResult> places_;
};

struct NominatimConfig {
    std::string base_url = "https://nominatim.openstreetmap.org";
    double timeout_s = 10.0;
    std::string user_agent = "geoqa/0.1";
};

/// GET {base}/search?q=<place>&format=json&limit=1 and reads the first hit's
/// "boundingbox" (strings, south/north/west/east).
class NominatimGeocoder : public Geocoder {
public:
    explicit NominatimGeocoder(NominatimConfig config) : config_(std::move(config)) {}
    GeocodeResult geocode(const std::string& place) override;

private:
    NominatimConfig config_;
};

/// Half the extent on the cut axis (central keeps the middle half of both
/// axes); scale multiplies both extents about the center. Throws
/// Error(DegenerateBox).
BoundingBox modify_bbox(const BoundingBox& box, const Directive& directive);

class RegionSelector {
public:
    RegionSelector(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<Geocoder> geocoder);

    /// Empty text -> nullopt (global search). Otherwise asks the
    /// BboxModifier for a Directive, geocodes and modifies. Cached per
    /// (session, text).
    std::optional<BoundingBox> resolve_region(const std::string& session, const std::string& region_text);

    GeocodeResult geocode(const std::string& place) { return geocoder_->geocode(place); }

private:
    std::shared_ptr<agent::AgentGateway> gateway_;
    std::shared_ptr<Geocoder> geocoder_;
    std::mutex mutex_;
    std::map<std::pair<std::string, std::string>, BoundingBox> cache_;
};

}  // namespace geoqa::region
