#include "geoqa/region/region_selector.hpp"

#include "geoqa/error.hpp"
#include "geoqa/http_client.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <fstream>

namespace geoqa::region {

namespace {

std::string place_key(std::string_view s) { return text::to_lower(text::collapse_whitespace(s)); }

double as_double(const nlohmann::json& v) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        return std::stod(v.get<std::string>());
    }
    throw Error(ErrorCode::InvalidArgument, "bounding box entry is not a number");
}

BoundingBox box_from(const nlohmann::json& arr) {
    if (!arr.is_array() || arr.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, "bounding box must have 4 entries");
    }
    return BoundingBox::checked(as_double(arr[0]), as_double(arr[1]), as_double(arr[2]), as_double(arr[3]));
}

}  // namespace

std::string_view to_string(Cut cut) {
    switch (cut) {
        case Cut::North: return "north";
        case Cut::South: return "south";
        case Cut::East: return "east";
        case Cut::West: return "west";
        case Cut::Central: return "central";
    }
    return "central";
}

Directive Directive::from_agent_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::MalformedDirective, "directive must be a JSON object");
    }
    Directive d;
    if (j.contains("place") && j["place"].is_string()) {
        d.place = text::collapse_whitespace(j["place"].get<std::string>());
    }
    if (d.place.empty()) {
        throw Error(ErrorCode::MalformedDirective, "directive has no place");
    }
    std::string mod;
    if (j.contains("modification") && j["modification"].is_string()) {
        mod = text::to_lower(text::collapse_whitespace(j["modification"].get<std::string>()));
    }
    std::optional<double> scale;
    if (j.contains("scale") && !j["scale"].is_null()) {
        try {
            scale = as_double(j["scale"]);
        } catch (const std::exception&) {
            throw Error(ErrorCode::MalformedDirective, "scale is not a number");
        }
    }
    static const std::map<std::string, Cut> cuts = {
        {"north", Cut::North}, {"south", Cut::South}, {"east", Cut::East}, {"west", Cut::West}, {"central", Cut::Central}};
    if (mod.empty() || mod == "none") {
        return d;
    }
    if (auto it = cuts.find(mod); it != cuts.end()) {
        d.cut = it->second;
        return d;
    }
    if (mod == "expand" || mod == "shrink" || mod == "scale") {
        if (!scale || *scale <= 0.0) {
            throw Error(ErrorCode::MalformedDirective, mod + " needs a positive scale factor");
        }
        if ((mod == "expand" && *scale < 1.0) || (mod == "shrink" && *scale > 1.0)) {
            throw Error(ErrorCode::MalformedDirective, mod + " contradicts scale " + text::format_number(*scale));
        }
        d.scale = scale;
        return d;
    }
    throw Error(ErrorCode::MalformedDirective, "unknown modification '" + mod + "'");
}

FixtureGeocoder::FixtureGeocoder(const nlohmann::json& fixture) {
    for (const auto& [name, entry] : fixture.at("places").items()) {
        places_[place_key(name)] = {box_from(entry.at("boundingbox")), entry.value("display_name", name)};
    }
}

FixtureGeocoder FixtureGeocoder::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read geocoder fixture " + file.string());
    }
    return FixtureGeocoder(nlohmann::json::parse(in));
}

GeocodeResult FixtureGeocoder::geocode(const std::string& place) {
    if (text::collapse_whitespace(place).empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty place name");
    }
    auto it = places_.find(place_key(place));
    if (it == places_.end()) {
        throw Error(ErrorCode::PlaceNotFound, "no geocoding result for '" + place + "'");
    }
    return it->second;
}

GeocodeResult NominatimGeocoder::geocode(const std::string& place) {
    if (text::collapse_whitespace(place).empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty place name");
    }
    HttpClient client(config_.base_url, config_.timeout_s, {{"User-Agent", config_.user_agent}});
    const auto res = client.get("/search", {{"q", place}, {"format", "json"}, {"limit", "1"}});
    if (res.status != 200) {
        throw Error(ErrorCode::GeocoderUnavailable,
                    res.status == 0 ? "geocoder unreachable: " + res.error
                                    : "geocoder returned HTTP " + std::to_string(res.status));
    }
    nlohmann::json hits;
    try {
        hits = nlohmann::json::parse(res.body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::GeocoderUnavailable, std::string("unreadable geocoder response: ") + e.what());
    }
    if (!hits.is_array() || hits.empty()) {
        throw Error(ErrorCode::PlaceNotFound, "no geocoding result for '" + place + "'");
    }
    try {
        return {box_from(hits[0].at("boundingbox")), hits[0].value("display_name", place)};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::GeocoderUnavailable, std::string("unexpected geocoder response: ") + e.what());
    }
}

BoundingBox modify_bbox(const BoundingBox& box, const Directive& directive) {
    BoundingBox out = box;
    if (directive.cut) {
        const double mid_lat = (box.min_lat + box.max_lat) / 2.0;
        const double mid_lon = (box.min_lon + box.max_lon) / 2.0;
        switch (*directive.cut) {
            case Cut::North: out.min_lat = mid_lat; break;
            case Cut::South: out.max_lat = mid_lat; break;
            case Cut::East: out.min_lon = mid_lon; break;
            case Cut::West: out.max_lon = mid_lon; break;
            case Cut::Central:
                out.min_lat = box.min_lat + box.lat_extent() / 4.0;
                out.max_lat = box.max_lat - box.lat_extent() / 4.0;
                out.min_lon = box.min_lon + box.lon_extent() / 4.0;
                out.max_lon = box.max_lon - box.lon_extent() / 4.0;
                break;
        }
    }
    if (directive.scale) {
        if (*directive.scale <= 0.0) {
            throw Error(ErrorCode::InvalidArgument, "scale must be positive");
        }
        const double clat = (out.min_lat + out.max_lat) / 2.0;
        const double clon = (out.min_lon + out.max_lon) / 2.0;
        const double hlat = out.lat_extent() * *directive.scale / 2.0;
        const double hlon = out.lon_extent() * *directive.scale / 2.0;
        out = {std::max(-90.0, clat - hlat), std::min(90.0, clat + hlat), std::max(-180.0, clon - hlon),
               std::min(180.0, clon + hlon)};
    }
    if (!(out.max_lat > out.min_lat) || !(out.max_lon > out.min_lon)) {
        throw Error(ErrorCode::DegenerateBox, "bounding box has zero extent after modification");
    }
    return out;
}

RegionSelector::RegionSelector(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<Geocoder> geocoder)
    : gateway_(std::move(gateway)), geocoder_(std::move(geocoder)) {}

std::optional<BoundingBox> RegionSelector::resolve_region(const std::string& session, const std::string& region_text) {
    const std::string text = text::collapse_whitespace(region_text);
    if (text.empty()) {
        return std::nullopt;
    }
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find({session, text}); it != cache_.end()) {
            return it->second;
        }
    }
    agent::CompletionRequest req;
    req.role = agent::AgentRole::BboxModifier;
    req.user_content = text;
    const Directive d = Directive::from_agent_json(gateway_->complete_json(session, req));
    const BoundingBox box = modify_bbox(geocoder_->geocode(d.place).box, d);
    std::lock_guard lock(mutex_);
    cache_.emplace(std::make_pair(session, text), box);
    return box;
}

}  // namespace geoqa::region
