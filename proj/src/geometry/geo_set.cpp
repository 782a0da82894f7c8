#include "geoqa/geometry/geo_set.hpp"

#include "geoqa/geometry/wkt.hpp"

namespace geoqa {

bool GeoSet::insert(EntityKey key, Geometry geometry) {
    std::string text = key.serialize();
    return insert(Entry{std::move(key), std::move(text), std::move(geometry)});
}

bool GeoSet::insert(const Entry& entry) {
    auto [it, added] = index_.try_emplace(entry.key_text, entries_.size());
    if (added) {
        entries_.push_back(entry);
    }
    return added;
}

std::optional<std::size_t> GeoSet::find(const std::string& key_text) const {
    auto it = index_.find(key_text);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> GeoSet::keys() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) {
        out.push_back(e.key_text);
    }
    return out;
}

std::optional<BoundingBox> GeoSet::bbox() const {
    if (entries_.empty()) {
        return std::nullopt;
    }
    BoundingBox b = entries_.front().geometry.bbox();
    for (const auto& e : entries_) {
        b = b.merged(e.geometry.bbox());
    }
    return b;
}

nlohmann::ordered_json GeoSet::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& e : entries_) {
        j[e.key_text] = to_wkt(e.geometry);
    }
    return j;
}

GeoSet bbox_filter(const GeoSet& set, const BoundingBox& box) {
    GeoSet out;
    for (const auto& e : set) {
        if (e.geometry.bbox().intersects(box)) {
            out.insert(e);
        }
    }
    return out;
}

}  // namespace geoqa
