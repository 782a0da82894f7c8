#pragma once

#include <string>
#include <string_view>

namespace geoqa {

/// Identity of one stored feature: database_type_name_id.
struct EntityKey {
    std::string database;
    std::string type_name;
    std::string name;
    std::string id;

    /// Fields joined with '_'. An empty name gives the three-segment form.
    std::string serialize() const;

    /// id is the rightmost segment, database and type_name the two leftmost,
    /// name whatever lies between. Throws Error(KeyParseError) for fewer than
    /// three segments.
    static EntityKey parse(std::string_view text);

    friend bool operator==(const EntityKey&, const EntityKey&) = default;
};

}  // namespace geoqa
