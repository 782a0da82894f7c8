#include "geoqa/planner/planner.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/text.hpp"

namespace geoqa::planner {

std::string_view to_string(Receiver r) { return r == Receiver::Analyzer ? "Analyzer" : "Explainer"; }

GeoSet geometries_of(const Value& v) {
    if (const auto* g = std::get_if<GeoSet>(&v)) {
        return *g;
    }
    GeoSet out;
    if (const auto* f = std::get_if<analyzer::FilterResult>(&v)) {
        for (const auto& e : f->subject) {
            out.insert(e);
        }
        for (const auto& e : f->object) {
            out.insert(e);
        }
    }
    return out;
}

nlohmann::json StepResult::summary_json() const {
    nlohmann::json layer_info = nlohmann::json::array();
    for (const auto& l : layers) {
        layer_info.push_back({{"name", l.name}, {"count", l.geometries.size()}});
    }
    nlohmann::json j = {{"id", id},
                        {"index", index},
                        {"description", step.description},
                        {"call", step.call.to_text()},
                        {"output", step.output_name},
                        {"layers", layer_info},
                        {"detail", detail}};
    if (box) {
        j["bbox"] = box->to_json();
    }
    if (!error.empty()) {
        j["error"] = error;
    }
    return j;
}

std::set<std::string> SessionState::variable_names() const {
    std::set<std::string> out;
    for (const auto& [k, v] : variables) {
        out.insert(k);
    }
    return out;
}

void SessionState::set_variable(const std::string& name, Value v) {
    if (!variables.count(name)) {
        variable_order.push_back(name);
    }
    variables[name] = std::move(v);
}

const StepResult* SessionState::step(const std::string& step_id) const {
    auto it = steps.find(step_id);
    return it == steps.end() ? nullptr : &it->second;
}

StepFailedError::StepFailedError(std::size_t step_index, ErrorCode cause, const std::string& message,
                                 std::vector<StepResult> completed)
    : Error(ErrorCode::StepFailed, "step " + std::to_string(step_index) + " failed (" +
                                       std::string(geoqa::to_string(cause)) + "): " + message),
      step_index_(step_index),
      cause_(cause),
      completed_(std::move(completed)) {}

Planner::Planner(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<region::RegionSelector> regions,
                 std::shared_ptr<retriever::EntityRetriever> retriever, std::shared_ptr<analyzer::DataAnalyzer> analyzer)
    : gateway_(std::move(gateway)),
      regions_(std::move(regions)),
      retriever_(std::move(retriever)),
      analyzer_(std::move(analyzer)) {}

Receiver Planner::route(const std::string& session, const std::string& prompt) {
    agent::CompletionRequest req;
    req.role = agent::AgentRole::Router;
    req.user_content = prompt;
    nlohmann::json j;
    try {
        j = gateway_->complete_json(session, req);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoJsonFound || e.code() == ErrorCode::JsonSyntax) {
            throw Error(ErrorCode::UnroutableResponse, std::string("router answer unusable: ") + e.what());
        }
        throw;
    }
    if (!j.is_object() || !j.contains("Receiver") || !j["Receiver"].is_string()) {
        throw Error(ErrorCode::UnroutableResponse, "router answer lacks \"Receiver\": " + j.dump());
    }
    const std::string r = text::to_lower(text::collapse_whitespace(j["Receiver"].get<std::string>()));
    if (r == "analyzer") {
        return Receiver::Analyzer;
    }
    if (r == "explainer") {
        return Receiver::Explainer;
    }
    throw Error(ErrorCode::UnroutableResponse, "unknown receiver " + j["Receiver"].dump());
}

RelationSpec Planner::analyze_relations(const std::string& session, const std::string& prompt,
                                        const std::vector<agent::Message>& context) {
    agent::CompletionRequest req;
    req.role = agent::AgentRole::RelationAnalyzer;
    req.user_content = prompt;
    req.context = context;
    nlohmann::json j;
    try {
        j = gateway_->complete_json(session, req);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoJsonFound || e.code() == ErrorCode::JsonSyntax) {
            throw Error(ErrorCode::MalformedSpec, std::string("relation answer unusable: ") + e.what());
        }
        throw;
    }
    return RelationSpec::from_json(j);
}

std::string planner_user_content(const std::string& prompt, const RelationSpec& spec,
                                 const std::vector<std::string>& session_variables) {
    std::string out = prompt + "\n\nentities and relations:\n" + spec.to_json().dump();
    if (!session_variables.empty()) {
        out += "\n\nvariables in history: " + text::join(session_variables, ", ");
    }
    return out;
}

TaskPlan Planner::plan_mission(SessionState& state, const RelationSpec& spec, const std::string& prompt) {
    for (const auto& r : spec.spatial_relations) {
        if (r.subject >= spec.entities.size() || r.object >= spec.entities.size()) {
            throw Error(ErrorCode::UnplannableSpec, "relation \"" + r.type + "\" references a missing entity");
        }
    }
    if (spec.entities.empty()) {
        throw Error(ErrorCode::UnplannableSpec, "no entities to search for");
    }
    agent::CompletionRequest req;
    req.role = agent::AgentRole::MissionPlanner;
    req.user_content = planner_user_content(prompt, spec, state.variable_order);
    req.context = state.history;
    req.system_slots["tools"] = std::string(agent::default_tool_catalog());
    const agent::CompletionResponse resp = gateway_->complete(state.id, req);
    return parse_plan(resp.text, state.variable_names());
}

StepResult Planner::run_step(SessionState& state, const PlanStep& step, std::size_t index) {
    StepResult r;
    r.index = index;
    r.step = step;
    const Call& c = step.call;
    auto var = [&](const Arg& a) -> Value {
        auto it = state.variables.find(a.text);
        if (it == state.variables.end()) {
            throw Error(ErrorCode::UnknownVariable, "variable " + a.text + " is not defined");
        }
        if (a.field.empty()) {
            return it->second;
        }
        const auto* f = std::get_if<analyzer::FilterResult>(&it->second);
        if (f == nullptr) {
            throw Error(ErrorCode::CallSyntax, a.text + " is not a geo_filter result");
        }
        return a.field == "subject" ? f->subject : f->object;
    };
    auto geo = [&](const Arg& a) {
        const Value v = var(a);
        if (std::holds_alternative<std::optional<BoundingBox>>(v)) {
            throw Error(ErrorCode::CallSyntax, a.text + " holds a bounding box, not an id_list");
        }
        return geometries_of(v);
    };

    if (c.function == kSetBoundingBox) {
        const std::string& address = c.args.at(0).text;
        state.box = regions_->resolve_region(state.id, address);
        r.box = state.box;
        r.detail = {{"address", address}};
        if (state.box) {
            r.detail["wkt"] = state.box->to_wkt();
        }
        state.set_variable(step.output_name, state.box);
    } else if (c.function == kIdListOfEntity) {
        const std::string& entity = c.args.at(0).text;
        retriever::Retrieval got = retriever_->retrieve(state.id, entity, state.box);
        r.detail = {{"entity", entity}, {"trace", got.trace.to_json()}, {"trace_text", got.trace.render()}};
        r.layers.push_back({step.output_name, got.geometries});
        state.set_variable(step.output_name, std::move(got.geometries));
    } else if (c.function == kGeoFilter) {
        const GeoSet subject = geo(c.args.at(1));
        const GeoSet object = geo(c.args.at(2));
        const SpatialOpSpec spec = analyzer_->classify_relation(state.id, c.args.at(0).text);
        analyzer::FilterResult fr = analyzer::geo_filter(spec, subject, object);
        r.detail = {{"relation", c.args.at(0).text}, {"spec", analyzer::to_json(spec)}};
        r.layers.push_back({step.output_name + "['subject']", fr.subject});
        r.layers.push_back({step.output_name + "['object']", fr.object});
        state.set_variable(step.output_name, std::move(fr));
    } else if (c.function == kSelect) {
        Value v = var(c.args.at(0));
        r.layers.push_back({step.output_name, geometries_of(v)});
        state.set_variable(step.output_name, std::move(v));
    } else {
        throw Error(ErrorCode::NonWhitelistedCall, "call to " + c.function + " is not allowed");
    }
    return r;
}

std::vector<StepResult> Planner::execute_plan(SessionState& state, const TaskPlan& plan) {
    std::vector<StepResult> done;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const std::string id = state.id + "-" + std::to_string(++state.step_counter);
        try {
            StepResult r = run_step(state, plan.steps[i], i + 1);
            r.id = id;
            state.steps[id] = r;
            state.step_order.push_back(id);
            done.push_back(std::move(r));
        } catch (const Error& e) {
            StepResult failed;
            failed.id = id;
            failed.index = i + 1;
            failed.step = plan.steps[i];
            failed.error = e.what();
            state.steps[id] = failed;
            state.step_order.push_back(id);
            throw StepFailedError(i + 1, e.code(), e.what(), done);
        }
    }
    return done;
}

}  // namespace geoqa::planner
