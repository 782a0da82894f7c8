#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/agent/transcript.hpp"
#include "geoqa/explainer/explainer.hpp"
#include "geoqa/planner/planner.hpp"
#include "geoqa/region/region_selector.hpp"
#include "geoqa/service/config.hpp"
#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>

namespace geoqa::service {

/// Everything the engine needs; from_config() builds these from a config,
/// tests assemble them directly.
struct EngineParts {
    std::shared_ptr<agent::CompletionBackend> backend;
    std::shared_ptr<store::KnowledgeStore> store;
    std::shared_ptr<region::Geocoder> geocoder;
    agent::GatewayOptions gateway_options;
    int explainer_max_iterations = 5;
    std::shared_ptr<agent::RecordingBackend> recorder;  // record mode only
    std::filesystem::path record_out;
};

struct QueryOutcome {
    int status = 200;
    nlohmann::json body;
    std::set<std::string> result_keys;  // final answer keys (Analyzer path)
};

/// Features grouped by (database, type) into layers named "database/type",
/// in first-appearance order. display_name is the entity name.
nlohmann::json layers_json(const GeoSet& set);

/// Builds the store (snapshot, datasets or synthetic city), the embedder,
/// the geocoder and the backend selected by `config`.
EngineParts build_parts(const ServiceConfig& config);

class Engine {
public:
    explicit Engine(EngineParts parts);

    /// Runs one prompt in a session (created on first use). Response body:
    /// {session_id, kind: layers|text|chart|error, message, steps:
    /// [{index, description, step_id}], layers, chart, table, usage}.
    /// Status 400 for an empty prompt, 502 for backend failures; domain
    /// errors are 200 with kind=error and the steps run so far.
    QueryOutcome query(const std::string& session_id, const std::string& prompt);

    /// {step_id, description, call, layers}; nullopt for unknown ids.
    std::optional<nlohmann::json> step(const std::string& step_id) const;

    /// Parses and ingests an upload. Throws Error(NotFeatureCollection) for
    /// malformed JSON or documents that are not a FeatureCollection.
    store::IngestReport ingest(const std::string& dataset, const std::string& body, const std::string& table = {});

    /// Fresh id for requests without one: "s1", "s2", ...
    std::string new_session_id();

    store::KnowledgeStore& store() { return *parts_.store; }
    agent::AgentGateway& gateway() { return *gateway_; }

    /// Writes the record-mode transcript, if any.
    void flush_recording() const;

private:
    EngineParts parts_;
    std::shared_ptr<agent::AgentGateway> gateway_;
    std::unique_ptr<planner::Planner> planner_;
    std::unique_ptr<explainer::Explainer> explainer_;

    mutable std::mutex mutex_;  // sessions_, step_index_, session_counter_
    std::map<std::string, std::shared_ptr<planner::SessionState>> sessions_;
    std::map<std::string, nlohmann::json> step_index_;  // rendered once, never changed
    std::size_t session_counter_ = 0;

    std::shared_ptr<planner::SessionState> session(const std::string& id);
    void index_steps(const planner::SessionState& s, std::size_t from);
    nlohmann::json run_analyzer(planner::SessionState& state, const std::string& prompt, std::set<std::string>& keys);
    nlohmann::json run_explainer(planner::SessionState& state, const std::string& prompt);
};

}  // namespace geoqa::service
