#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/geometry/geo_set.hpp"
#include "geoqa/geometry/predicates.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace geoqa::analyzer {

struct FilterResult {
    GeoSet subject;
    GeoSet object;
};

nlohmann::json to_json(const SpatialOpSpec& spec);

/// Validates an agent answer {spatial_type, num, negation}. Throws
/// Error(UnknownSpatialType) or Error(MissingDistance). num is dropped for
/// non-buffer types.
SpatialOpSpec spec_from_json(const nlohmann::json& j);

/// Single-word relations that need no agent ("contains", "has", "within",
/// "intersects", ...).
std::optional<SpatialOpSpec> direct_relation(std::string_view relation_text);

/// Subject items that satisfy the relation with at least one object are
/// kept; with negation, the subject items that satisfy it with none. Object
/// items are kept when relate(spec) holds for at least one kept subject.
/// Candidate pairs come from an STR-tree over the objects. Throws
/// Error(EmptyInput) naming the empty side. Input order is preserved.
FilterResult geo_filter(const SpatialOpSpec& spec, const GeoSet& subject, const GeoSet& object);

class DataAnalyzer {
public:
    explicit DataAnalyzer(std::shared_ptr<agent::AgentGateway> gateway) : gateway_(std::move(gateway)) {}

    /// Direct keyword, otherwise the ModifyAgent.
    SpatialOpSpec classify_relation(const std::string& session, const std::string& relation_text);

private:
    std::shared_ptr<agent::AgentGateway> gateway_;
};

}  // namespace geoqa::analyzer
