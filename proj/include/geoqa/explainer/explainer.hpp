#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/explainer/graph_query.hpp"
#include "geoqa/planner/planner.hpp"
#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace geoqa::explainer {

inline constexpr int kChartSpecVersion = 1;

/// Histogram ready for the UI. counts.size() == bin_edges.size() - 1.
struct ChartSpec {
    std::string kind = "histogram";
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    std::string title;
    std::string x_label;

    /// {"version": 1, "kind", "bin_edges", "counts", "title", "x_label"}
    nlohmann::json to_json() const;
    static ChartSpec from_json(const nlohmann::json& j);
};

/// Equal-width bins over [min, max]; Sturges' rule when `bins` is absent.
/// Intervals are half-open except the last. Equal values get the unit range
/// [v, v + 1]. Throws Error(EmptyValues), and Error(InvalidArgument) for
/// non-finite values or zero bins.
ChartSpec make_histogram(const std::vector<double>& values, std::optional<std::size_t> bins = std::nullopt,
                         std::string title = {}, std::string x_label = {});

struct ExplainResult {
    enum class Kind { Text, Chart, Table };
    Kind kind = Kind::Text;
    std::string text;
    std::optional<ChartSpec> chart;  // Kind::Chart
    std::optional<GraphRows> table;  // Kind::Table
    int iterations = 0;

    nlohmann::json to_json() const;
};

std::string_view to_string(ExplainResult::Kind k);

/// Text given to the Explainer through its {{context}} slot: session
/// variables with sizes, executed steps and recent exchanges.
std::string session_context(const planner::SessionState& state);

class Explainer {
public:
    Explainer(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<store::KnowledgeStore> store,
              int max_iterations = 5);

    /// Agent loop. A ```cypher block runs against the schema graph and the
    /// rows go back to the agent; a ```chart block is answered with a
    /// histogram; a reply with neither ends the loop. Query and chart errors
    /// are reported back to the agent. Throws Error(IterationLimit).
    ExplainResult explain(planner::SessionState& state, const std::string& prompt);

private:
    std::shared_ptr<agent::AgentGateway> gateway_;
    std::shared_ptr<store::KnowledgeStore> store_;
    int max_iterations_;

    ChartSpec chart_from_request(const planner::SessionState& state, const nlohmann::json& req) const;
};

}  // namespace geoqa::explainer
