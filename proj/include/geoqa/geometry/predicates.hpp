#pragma once

#include "geoqa/geometry/geometry.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace geoqa {

enum class SpatialType { Buffer, Intersects, Contains, Within };

std::string_view to_string(SpatialType type);

/// Accepts the canonical names ("buffer", "intersects", "contains",
/// "within") case-insensitively. Throws Error(InvalidArgument) otherwise.
SpatialType parse_spatial_type(std::string_view name);

struct SpatialOpSpec {
    SpatialType spatial_type = SpatialType::Intersects;
    std::optional<double> num;  // meters, buffer only
    bool negation = false;

    friend bool operator==(const SpatialOpSpec&, const SpatialOpSpec&) = default;
};

bool intersects(const Geometry& a, const Geometry& b);

/// Closure of b inside a, with at least one interior point of b in the
/// interior of a.
bool contains(const Geometry& a, const Geometry& b);

bool within(const Geometry& a, const Geometry& b);

/// Evaluates spec with subject first. Throws Error(MissingDistance) for a
/// buffer without num.
bool relate(const Geometry& subject, const Geometry& object, const SpatialOpSpec& spec);

}  // namespace geoqa
