#include "geoqa/service/engine.hpp"

#include "geoqa/error.hpp"
#include "geoqa/eval/city.hpp"
#include "geoqa/geometry/wkt.hpp"
#include "geoqa/text.hpp"

#include <fstream>
#include <sstream>

namespace geoqa::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Exchanges the RelationAnalyzer sees from earlier prompts.
constexpr std::size_t kFollowUpExchanges = 3;

json read_json_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read " + file.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::NotFeatureCollection, file.string() + ": " + e.what());
    }
}

json usage_delta(const agent::TokenUsage& before, const agent::TokenUsage& after) {
    return {{"input_tokens", after.input_tokens - before.input_tokens},
            {"output_tokens", after.output_tokens - before.output_tokens}};
}

json error_body(const std::string& message) {
    return {{"kind", "error"}, {"message", message}};
}

// Answer keys and the geometries shown for the last step of a plan.
void final_value(const planner::SessionState& state, const planner::PlanStep& last, GeoSet& display,
                 std::set<std::string>& keys) {
    const auto& v = state.variables.at(last.output_name);
    if (const auto* g = std::get_if<GeoSet>(&v)) {
        const auto k = g->keys();
        keys.insert(k.begin(), k.end());
        display = *g;
        // a selection out of a filter result is shown with the objects it was filtered by
        if (last.call.function == planner::kSelect) {
            const auto& src = state.variables.at(last.call.args.at(0).text);
            if (std::holds_alternative<analyzer::FilterResult>(src)) {
                display = planner::geometries_of(src);
            }
        }
    } else if (const auto* f = std::get_if<analyzer::FilterResult>(&v)) {
        const auto k = f->subject.keys();
        keys.insert(k.begin(), k.end());
        display = planner::geometries_of(v);
    }
}

json features_json(const GeoSet& set) {
    json features = json::array();
    for (const auto& e : set) {
        features.push_back({{"key", e.key_text},
                            {"wkt", to_wkt(e.geometry)},
                            {"display_name", e.key.name.empty() ? e.key.type_name : e.key.name}});
    }
    return features;
}

json step_snapshot(const planner::StepResult& r) {
    json layers = json::array();
    for (const auto& l : r.layers) {
        layers.push_back({{"layer_name", l.name}, {"features", features_json(l.geometries)}});
    }
    json j = {{"step_id", r.id}, {"index", r.index}, {"description", r.step.description},
              {"call", r.step.call.to_text()}, {"layers", layers}};
    if (r.box) {
        j["bbox"] = r.box->to_json();
    }
    if (!r.error.empty()) {
        j["error"] = r.error;
    }
    return j;
}

}  // namespace

json layers_json(const GeoSet& set) {
    std::vector<std::string> order;
    std::map<std::string, GeoSet> groups;
    for (const auto& e : set) {
        const std::string name = e.key.database + "/" + e.key.type_name;
        if (!groups.count(name)) {
            order.push_back(name);
        }
        groups[name].insert(e);
    }
    json out = json::array();
    for (const auto& name : order) {
        out.push_back({{"layer_name", name}, {"features", features_json(groups[name])}});
    }
    return out;
}

EngineParts build_parts(const ServiceConfig& config) {
    EngineParts parts;
    std::shared_ptr<store::Embedder> embedder;
    if (config.embedding == "anchored") {
        embedder = std::make_shared<store::AnchoredEmbedder>(
            store::AnchoredEmbedder::load(config.embedding_fixture, config.embedding_dim));
    } else if (config.embedding == "live") {
        embedder = std::make_shared<store::LiveEmbedder>(config.embedding_live, config.embedding_dim);
    } else {
        embedder = std::make_shared<store::TrigramEmbedder>(config.embedding_dim);
    }
    parts.store = std::make_shared<store::KnowledgeStore>(embedder);
    if (!config.store_dir.empty() && fs::exists(config.store_dir / "tables.json")) {
        parts.store->load(config.store_dir);
    } else if (!config.datasets.empty()) {
        for (const auto& d : config.datasets) {
            parts.store->ingest_geojson(d.name, read_json_file(d.file), d.table);
        }
    } else if (config.city_seed) {
        eval::ingest_city(*parts.store, eval::generate_city(*config.city_seed));
    }

    if (config.geocoder == "nominatim") {
        parts.geocoder = std::make_shared<region::NominatimGeocoder>(config.nominatim);
    } else {
        parts.geocoder = std::make_shared<region::FixtureGeocoder>(region::FixtureGeocoder::load(config.geocoder_fixture));
    }

    if (config.mode == "scripted") {
        parts.backend = std::make_shared<agent::ScriptedBackend>(
            config.transcripts.empty() ? agent::Transcript{} : agent::Transcript::load(config.transcripts),
            config.miss_log);
    } else {
        auto live = std::make_shared<agent::LiveBackend>(config.llm);
        if (config.mode == "record") {
            parts.recorder = std::make_shared<agent::RecordingBackend>(live);
            parts.backend = parts.recorder;
            parts.record_out = config.record_out;
        } else {
            parts.backend = live;
        }
    }
    parts.gateway_options = {config.max_retries, std::chrono::milliseconds(config.backoff_ms)};
    parts.explainer_max_iterations = config.explainer_max_iterations;
    return parts;
}

Engine::Engine(EngineParts parts) : parts_(std::move(parts)) {
    gateway_ = std::make_shared<agent::AgentGateway>(parts_.backend, parts_.gateway_options);
    planner_ = std::make_unique<planner::Planner>(
        gateway_, std::make_shared<region::RegionSelector>(gateway_, parts_.geocoder),
        std::make_shared<retriever::EntityRetriever>(parts_.store, gateway_),
        std::make_shared<analyzer::DataAnalyzer>(gateway_));
    explainer_ = std::make_unique<explainer::Explainer>(gateway_, parts_.store, parts_.explainer_max_iterations);
}

std::string Engine::new_session_id() {
    std::lock_guard lock(mutex_);
    return "s" + std::to_string(++session_counter_);
}

std::shared_ptr<planner::SessionState> Engine::session(const std::string& id) {
    std::lock_guard lock(mutex_);
    auto& s = sessions_[id];
    if (!s) {
        s = std::make_shared<planner::SessionState>(id);
        gateway_->open_session(id);
    }
    return s;
}

void Engine::index_steps(const planner::SessionState& s, std::size_t from) {
    std::lock_guard lock(mutex_);
    for (std::size_t i = from; i < s.step_order.size(); ++i) {
        step_index_[s.step_order[i]] = step_snapshot(s.steps.at(s.step_order[i]));
    }
}

json Engine::run_analyzer(planner::SessionState& state, const std::string& prompt, std::set<std::string>& keys) {
    std::vector<agent::Message> recent;
    const std::size_t keep = std::min(state.history.size(), 2 * kFollowUpExchanges);
    recent.assign(state.history.end() - static_cast<std::ptrdiff_t>(keep), state.history.end());

    const auto spec = planner_->analyze_relations(state.id, prompt, recent);
    const auto plan = planner_->plan_mission(state, spec, prompt);
    planner_->execute_plan(state, plan);

    GeoSet display;
    final_value(state, plan.steps.back(), display, keys);
    json layers = layers_json(display);
    std::ostringstream msg;
    msg << "Found " << keys.size() << (keys.size() == 1 ? " result" : " results");
    if (!layers.empty()) {
        std::vector<std::string> parts;
        for (const auto& l : layers) {
            parts.push_back(l["layer_name"].get<std::string>() + " (" + std::to_string(l["features"].size()) + ")");
        }
        msg << "; shown with " << text::join(parts, ", ");
    }
    msg << ".";
    return {{"kind", "layers"}, {"message", msg.str()}, {"layers", layers}};
}

json Engine::run_explainer(planner::SessionState& state, const std::string& prompt) {
    const auto r = explainer_->explain(state, prompt);
    json body = {{"kind", r.kind == explainer::ExplainResult::Kind::Chart ? "chart" : "text"}, {"message", r.text}};
    if (r.chart) {
        body["chart"] = r.chart->to_json();
    }
    if (r.table) {
        body["table"] = r.table->to_json();
    }
    return body;
}

QueryOutcome Engine::query(const std::string& session_id, const std::string& prompt) {
    QueryOutcome out;
    if (text::collapse_whitespace(prompt).empty()) {
        out.status = 400;
        out.body = error_body("prompt must not be empty");
        return out;
    }
    const std::string sid = session_id.empty() ? new_session_id() : session_id;
    auto s = session(sid);
    std::lock_guard session_lock(s->mutex);  // one prompt in flight per session

    const auto before = gateway_->usage_report(sid);
    const std::size_t first_step = s->step_order.size();
    bool analyzer_ran = false;
    try {
        const auto receiver = planner_->route(sid, prompt);
        if (receiver == planner::Receiver::Analyzer) {
            analyzer_ran = true;
            out.body = run_analyzer(*s, prompt, out.result_keys);
        } else {
            out.body = run_explainer(*s, prompt);
        }
    } catch (const Error& e) {
        out.result_keys.clear();
        const auto* failed = dynamic_cast<const planner::StepFailedError*>(&e);
        if (is_backend_failure(e.code()) || (failed != nullptr && is_backend_failure(failed->cause()))) {
            out.status = 502;
        }
        out.body = error_body(e.what());
        out.body["code"] = std::string(to_string(e.code()));
    }
    index_steps(*s, first_step);
    if (analyzer_ran) {
        json steps = json::array();
        for (std::size_t i = first_step; i < s->step_order.size(); ++i) {
            const auto& r = s->steps.at(s->step_order[i]);
            json st = {{"index", r.index}, {"description", r.step.description}, {"step_id", r.id}};
            if (!r.error.empty()) {
                st["error"] = r.error;
            }
            steps.push_back(st);
        }
        out.body["steps"] = steps;
    }
    out.body["session_id"] = sid;
    out.body["usage"] = usage_delta(before, gateway_->usage_report(sid));
    s->history.push_back({"user", prompt});
    s->history.push_back({"assistant", out.body.value("message", "")});
    if (parts_.recorder) {
        flush_recording();
    }
    return out;
}

std::optional<json> Engine::step(const std::string& step_id) const {
    std::lock_guard lock(mutex_);
    auto it = step_index_.find(step_id);
    if (it == step_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

store::IngestReport Engine::ingest(const std::string& dataset, const std::string& body, const std::string& table) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::NotFeatureCollection, std::string("upload is not JSON: ") + e.what());
    }
    return parts_.store->ingest_geojson(dataset, doc, table);
}

void Engine::flush_recording() const {
    if (parts_.recorder && !parts_.record_out.empty()) {
        parts_.recorder->recorded().save(parts_.record_out);
    }
}

}  // namespace geoqa::service
