#include "geoqa/analyzer/data_analyzer.hpp"

#include "geoqa/error.hpp"
#include "geoqa/geometry/spatial_index.hpp"
#include "geoqa/text.hpp"

#include <map>

namespace geoqa::analyzer {

nlohmann::json to_json(const SpatialOpSpec& spec) {
    return {{"spatial_type", to_string(spec.spatial_type)},
            {"num", spec.num ? nlohmann::json(*spec.num) : nlohmann::json(nullptr)},
            {"negation", spec.negation}};
}

SpatialOpSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("spatial_type") || !j["spatial_type"].is_string()) {
        throw Error(ErrorCode::UnknownSpatialType, "relation answer lacks \"spatial_type\"");
    }
    SpatialOpSpec spec;
    try {
        spec.spatial_type = parse_spatial_type(text::collapse_whitespace(j["spatial_type"].get<std::string>()));
    } catch (const Error&) {
        throw Error(ErrorCode::UnknownSpatialType, "unknown spatial_type " + j["spatial_type"].dump());
    }
    if (j.contains("negation")) {
        const auto& n = j["negation"];
        if (n.is_boolean()) {
            spec.negation = n.get<bool>();
        } else if (n.is_string()) {
            spec.negation = text::to_lower(n.get<std::string>()) == "true";
        }
    }
    if (spec.spatial_type != SpatialType::Buffer) {
        return spec;
    }
    std::optional<double> num;
    if (j.contains("num")) {
        const auto& n = j["num"];
        if (n.is_number()) {
            num = n.get<double>();
        } else if (n.is_string()) {
            try {
                num = std::stod(n.get<std::string>());
            } catch (const std::exception&) {
            }
        }
    }
    if (!num || !(*num > 0.0)) {
        throw Error(ErrorCode::MissingDistance, "buffer relation needs a positive distance in meters");
    }
    spec.num = num;
    return spec;
}

std::optional<SpatialOpSpec> direct_relation(std::string_view relation_text) {
    static const std::map<std::string, SpatialType> words = {
        {"contain", SpatialType::Contains},     {"contains", SpatialType::Contains},
        {"containing", SpatialType::Contains},  {"has", SpatialType::Contains},
        {"have", SpatialType::Contains},        {"intersect", SpatialType::Intersects},
        {"intersects", SpatialType::Intersects}, {"intersecting", SpatialType::Intersects},
        {"within", SpatialType::Within},        {"inside", SpatialType::Within},
    };
    auto it = words.find(text::to_lower(text::collapse_whitespace(relation_text)));
    if (it == words.end()) {
        return std::nullopt;
    }
    return SpatialOpSpec{it->second, std::nullopt, false};
}

FilterResult geo_filter(const SpatialOpSpec& spec, const GeoSet& subject, const GeoSet& object) {
    if (subject.empty()) {
        throw Error(ErrorCode::EmptyInput, "subject set is empty");
    }
    if (object.empty()) {
        throw Error(ErrorCode::EmptyInput, "object set is empty");
    }
    if (spec.spatial_type == SpatialType::Buffer && !spec.num) {
        throw Error(ErrorCode::MissingDistance, "buffer relation needs a distance");
    }
    SpatialOpSpec positive = spec;
    positive.negation = false;
    const SpatialIndex index(object);

    // matches[i]: objects positively related to subject i (index-pruned).
    std::vector<std::vector<std::size_t>> matches(subject.size());
    for (std::size_t i = 0; i < subject.size(); ++i) {
        const Geometry& s = subject[i].geometry;
        const BoundingBox probe =
            spec.spatial_type == SpatialType::Buffer ? s.bbox().expanded_by_meters(*spec.num) : s.bbox();
        for (std::size_t j : index.candidates(probe)) {
            if (relate(s, object[j].geometry, positive)) {
                matches[i].push_back(j);
            }
        }
    }

    FilterResult out;
    std::vector<bool> keep_object(object.size(), false);
    for (std::size_t i = 0; i < subject.size(); ++i) {
        const bool hit = !matches[i].empty();
        if (hit == spec.negation) {
            continue;
        }
        out.subject.insert(subject[i]);
        if (spec.negation) {
            // A kept subject relates positively to no object, so the negated
            // relation holds against every object.
            std::fill(keep_object.begin(), keep_object.end(), true);
        } else {
            for (std::size_t j : matches[i]) {
                keep_object[j] = true;
            }
        }
    }
    for (std::size_t j = 0; j < object.size(); ++j) {
        if (keep_object[j]) {
            out.object.insert(object[j]);
        }
    }
    return out;
}

SpatialOpSpec DataAnalyzer::classify_relation(const std::string& session, const std::string& relation_text) {
    const std::string text = text::collapse_whitespace(relation_text);
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty relation text");
    }
    if (auto direct = direct_relation(text)) {
        return *direct;
    }
    agent::CompletionRequest req;
    req.role = agent::AgentRole::ModifyAgent;
    req.user_content = text;
    return spec_from_json(gateway_->complete_json(session, req));
}

}  // namespace geoqa::analyzer
