#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace geoqa::planner {

struct RelationSpec {
    struct Relation {
        std::string type;
        std::size_t subject = 0;
        std::size_t object = 0;
        friend bool operator==(const Relation&, const Relation&) = default;
    };
    std::vector<std::string> entities;
    std::vector<Relation> spatial_relations;
    std::string region;

    /// Accepts subject/object or head/tail keys and entity objects
    /// ({"entity_text": ...}) or bare strings. Throws Error(MalformedSpec).
    static RelationSpec from_json(const nlohmann::json& j);
    /// Canonical form with subject/object keys.
    nlohmann::json to_json() const;

    friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

inline constexpr const char* kSetBoundingBox = "set_bounding_box";
inline constexpr const char* kIdListOfEntity = "id_list_of_entity";
inline constexpr const char* kGeoFilter = "geo_filter";
/// Pseudo-function for `x = result['subject']` lines.
inline constexpr const char* kSelect = "select";

struct Arg {
    enum class Kind { String, Number, Variable };
    Kind kind = Kind::String;
    std::string text;   // string value or variable name
    double number = 0.0;
    std::string field;  // "subject"/"object" for result['subject'], else empty

    friend bool operator==(const Arg&, const Arg&) = default;
};

struct Call {
    std::string function;
    std::vector<Arg> args;

    /// Python-like source text of the call.
    std::string to_text() const;
    friend bool operator==(const Call&, const Call&) = default;
};

struct PlanStep {
    std::string description;
    Call call;
    std::string output_name;

    nlohmann::json to_json() const;
};

struct TaskPlan {
    std::vector<PlanStep> steps;
    nlohmann::json to_json() const;
};

/// One line of planner code: `[name =] function(args)` or
/// `name = variable['subject'|'object']`. Arguments are quoted strings,
/// numbers, variables, or variable['field']. Variables must be in `known`
/// when it is given. Throws Error(CallSyntax), Error(NonWhitelistedCall) or
/// Error(UnknownVariable).
PlanStep parse_call_text(std::string_view line, const std::set<std::string>* known = nullptr);

/// Parses the planner's code (the last fenced block, or the whole text).
/// Comment lines become the description of the step that follows; a step
/// without one gets a generated description. Variables must be defined by an
/// earlier step or be in `session_vars`. Throws like parse_call_text and
/// Error(UnplannableSpec) for an empty plan.
TaskPlan parse_plan(std::string_view planner_text, const std::set<std::string>& session_vars);

}  // namespace geoqa::planner
