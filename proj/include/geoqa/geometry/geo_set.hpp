#pragma once

#include "geoqa/geometry/entity_key.hpp"
#include "geoqa/geometry/geometry.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace geoqa {

/// Insertion-ordered EntityKey -> Geometry map with unique keys.
class GeoSet {
public:
    struct Entry {
        EntityKey key;
        std::string key_text;
        Geometry geometry;
    };

    /// Adds the entry unless its key is present; returns whether it was added.
    bool insert(EntityKey key, Geometry geometry);
    bool insert(const Entry& entry);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const Entry& operator[](std::size_t i) const { return entries_[i]; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    std::optional<std::size_t> find(const std::string& key_text) const;
    bool contains(const std::string& key_text) const { return find(key_text).has_value(); }

    std::vector<std::string> keys() const;

    /// Union of all geometry boxes; nullopt for an empty set.
    std::optional<BoundingBox> bbox() const;

    /// {"key": "WKT", ...} in insertion order.
    nlohmann::ordered_json to_json() const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Entries whose geometry box intersects `box`, order preserved.
GeoSet bbox_filter(const GeoSet& set, const BoundingBox& box);

}  // namespace geoqa
