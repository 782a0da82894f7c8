#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/analyzer/data_analyzer.hpp"
#include "geoqa/error.hpp"
#include "geoqa/geometry/bounding_box.hpp"
#include "geoqa/geometry/geo_set.hpp"
#include "geoqa/planner/plan.hpp"
#include "geoqa/region/region_selector.hpp"
#include "geoqa/retriever/entity_retriever.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace geoqa::planner {

enum class Receiver { Analyzer, Explainer };

std::string_view to_string(Receiver r);

/// Value held by a plan variable. set_bounding_box stores the box (nullopt
/// for a global search).
using Value = std::variant<GeoSet, std::optional<BoundingBox>, analyzer::FilterResult>;

/// Geometries of a value, flattened: a FilterResult gives subject then
/// object entries; a box gives nothing.
GeoSet geometries_of(const Value& v);

struct Layer {
    std::string name;
    GeoSet geometries;
};

struct StepResult {
    std::string id;          // "<session>-<n>", unique within the session
    std::size_t index = 0;   // 1-based within its plan
    PlanStep step;
    std::vector<Layer> layers;
    std::optional<BoundingBox> box;  // set_bounding_box only
    nlohmann::json detail = nlohmann::json::object();  // retrieval trace, op spec
    std::string error;       // empty on success

    /// Without geometries: id, index, description, call, counts, detail.
    nlohmann::json summary_json() const;
};

/// Per-session state: variables, the active bounding box, conversation
/// history and every executed step. Callers serialize access with `mutex`.
struct SessionState {
    explicit SessionState(std::string session_id) : id(std::move(session_id)) {}

    std::string id;
    std::mutex mutex;
    std::map<std::string, Value> variables;
    std::vector<std::string> variable_order;  // first assignment order
    std::optional<BoundingBox> box;
    std::vector<agent::Message> history;
    std::map<std::string, StepResult> steps;
    std::vector<std::string> step_order;  // execution order of steps
    std::size_t step_counter = 0;

    std::set<std::string> variable_names() const;
    void set_variable(const std::string& name, Value v);
    const StepResult* step(const std::string& step_id) const;
};

/// Thrown by execute_plan. Steps before `step_index` are kept in the session
/// and in `completed`.
class StepFailedError : public Error {
public:
    StepFailedError(std::size_t step_index, ErrorCode cause, const std::string& message, std::vector<StepResult> completed);

    std::size_t step_index() const noexcept { return step_index_; }
    ErrorCode cause() const noexcept { return cause_; }
    const std::vector<StepResult>& completed() const noexcept { return completed_; }

private:
    std::size_t step_index_;
    ErrorCode cause_;
    std::vector<StepResult> completed_;
};

class Planner {
public:
    Planner(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<region::RegionSelector> regions,
            std::shared_ptr<retriever::EntityRetriever> retriever, std::shared_ptr<analyzer::DataAnalyzer> analyzer);

    /// Router call. Throws Error(UnroutableResponse) when the answer has no
    /// recognizable "Receiver".
    Receiver route(const std::string& session, const std::string& prompt);

    /// RelationAnalyzer call; `context` carries earlier exchanges of the
    /// session. Throws Error(MalformedSpec).
    RelationSpec analyze_relations(const std::string& session, const std::string& prompt,
                                   const std::vector<agent::Message>& context = {});

    /// MissionPlanner call; the user content is the prompt, the spec JSON and
    /// the session's variables. Throws Error(UnplannableSpec) for a spec whose
    /// relations point outside its entities, and the parse_plan errors.
    TaskPlan plan_mission(SessionState& state, const RelationSpec& spec, const std::string& prompt);

    /// Runs the steps in order against `state` (the caller holds its mutex).
    std::vector<StepResult> execute_plan(SessionState& state, const TaskPlan& plan);

    agent::AgentGateway& gateway() { return *gateway_; }

private:
    std::shared_ptr<agent::AgentGateway> gateway_;
    std::shared_ptr<region::RegionSelector> regions_;
    std::shared_ptr<retriever::EntityRetriever> retriever_;
    std::shared_ptr<analyzer::DataAnalyzer> analyzer_;

    StepResult run_step(SessionState& state, const PlanStep& step, std::size_t index);
};

/// User content sent to the MissionPlanner.
std::string planner_user_content(const std::string& prompt, const RelationSpec& spec,
                                 const std::vector<std::string>& session_variables);

}  // namespace geoqa::planner
