#include "geoqa/explainer/explainer.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/error.hpp"
#include "geoqa/geometry/measure.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace geoqa::explainer {

nlohmann::json ChartSpec::to_json() const {
    return {{"version", kChartSpecVersion}, {"kind", kind},   {"bin_edges", bin_edges},
            {"counts", counts},             {"title", title}, {"x_label", x_label}};
}

ChartSpec ChartSpec::from_json(const nlohmann::json& j) {
    ChartSpec c;
    try {
        c.kind = j.at("kind").get<std::string>();
        c.bin_edges = j.at("bin_edges").get<std::vector<double>>();
        c.counts = j.at("counts").get<std::vector<std::size_t>>();
        c.title = j.value("title", "");
        c.x_label = j.value("x_label", "");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad chart spec: ") + e.what());
    }
    if (c.counts.size() + 1 != c.bin_edges.size()) {
        throw Error(ErrorCode::InvalidArgument, "chart spec needs one more edge than counts");
    }
    return c;
}

ChartSpec make_histogram(const std::vector<double>& values, std::optional<std::size_t> bins, std::string title,
                         std::string x_label) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyValues, "no values to draw");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::InvalidArgument, "histogram values must be finite");
        }
    }
    if (bins && *bins == 0) {
        throw Error(ErrorCode::InvalidArgument, "bin count must be positive");
    }
    const std::size_t n = values.size();
    const std::size_t k =
        bins.value_or(static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it > lo ? *hi_it : lo + 1.0;
    const double width = (hi - lo) / static_cast<double>(k);

    ChartSpec c;
    c.title = std::move(title);
    c.x_label = std::move(x_label);
    c.bin_edges.resize(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
        c.bin_edges[i] = lo + width * static_cast<double>(i);
    }
    c.bin_edges[k] = hi;  // no drift at the top edge
    c.counts.assign(k, 0);
    for (double v : values) {
        auto idx = static_cast<std::ptrdiff_t>(std::floor((v - lo) / width));
        idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(k) - 1);
        // floor() can land one bin off near an edge.
        while (idx > 0 && v < c.bin_edges[idx]) {
            --idx;
        }
        while (idx + 1 < static_cast<std::ptrdiff_t>(k) && v >= c.bin_edges[idx + 1]) {
            ++idx;
        }
        ++c.counts[static_cast<std::size_t>(idx)];
    }
    return c;
}

std::string_view to_string(ExplainResult::Kind k) {
    switch (k) {
        case ExplainResult::Kind::Text: return "text";
        case ExplainResult::Kind::Chart: return "chart";
        case ExplainResult::Kind::Table: return "table";
    }
    return "text";
}

nlohmann::json ExplainResult::to_json() const {
    nlohmann::json j = {{"kind", to_string(kind)}, {"text", text}, {"iterations", iterations}};
    if (chart) {
        j["chart"] = chart->to_json();
    }
    if (table) {
        j["table"] = table->to_json();
    }
    return j;
}

namespace {

std::string describe_set(const GeoSet& g) {
    std::map<std::string, std::size_t> per;
    for (const auto& e : g) {
        ++per[e.key.database + "/" + e.key.type_name];
    }
    std::vector<std::string> parts;
    for (const auto& [k, n] : per) {
        parts.push_back(k + " " + std::to_string(n));
    }
    return std::to_string(g.size()) + " entities" + (parts.empty() ? "" : " (" + text::join(parts, ", ") + ")");
}

// Answer text keeps its line layout; only the ends are trimmed.
std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// Reply text without fenced blocks.
std::string prose(const std::string& reply) {
    std::string out;
    std::size_t pos = 0;
    for (const auto& b : agent::fenced_blocks(reply)) {
        const std::size_t open = reply.rfind("```", b.offset);
        out += reply.substr(pos, open - pos);
        const std::size_t close = reply.find("```", b.offset + b.body.size());
        pos = close == std::string::npos ? reply.size() : close + 3;
    }
    out += reply.substr(std::min(pos, reply.size()));
    return trimmed(out);
}

}  // namespace

std::string session_context(const planner::SessionState& state) {
    std::ostringstream out;
    if (state.variable_order.empty()) {
        out << "No previous query results exist in this session.\n";
    } else {
        out << "Variables:\n";
        for (const auto& name : state.variable_order) {
            const planner::Value& v = state.variables.at(name);
            out << "- " << name << ": ";
            if (const auto* box = std::get_if<std::optional<BoundingBox>>(&v)) {
                out << "bounding box " << (*box ? (*box)->to_wkt() : std::string("(global search)"));
            } else if (const auto* f = std::get_if<analyzer::FilterResult>(&v)) {
                out << "geo_filter result, subject " << describe_set(f->subject) << ", object "
                    << describe_set(f->object);
            } else {
                out << "id_list, " << describe_set(std::get<GeoSet>(v));
            }
            out << "\n";
        }
    }
    std::vector<const planner::StepResult*> steps;
    for (const auto& id : state.step_order) {
        steps.push_back(&state.steps.at(id));
    }
    if (!steps.empty()) {
        out << "Executed steps:\n";
        for (const auto* s : steps) {
            out << "- " << s->step.description << ": " << s->step.call.to_text()
                << (s->error.empty() ? "" : " (failed: " + s->error + ")") << "\n";
        }
    }
    return out.str();
}

Explainer::Explainer(std::shared_ptr<agent::AgentGateway> gateway, std::shared_ptr<store::KnowledgeStore> store,
                     int max_iterations)
    : gateway_(std::move(gateway)), store_(std::move(store)), max_iterations_(max_iterations) {}

ChartSpec Explainer::chart_from_request(const planner::SessionState& state, const nlohmann::json& req) const {
    if (!req.is_object() || !req.contains("variable") || !req["variable"].is_string()) {
        throw Error(ErrorCode::InvalidArgument, "chart request needs a \"variable\"");
    }
    const std::string var = req["variable"].get<std::string>();
    const std::string measure = req.value("measure", std::string("area"));
    if (measure != "area") {
        throw Error(ErrorCode::UnsupportedFeature, "only the area measure is available");
    }
    auto it = state.variables.find(var);
    if (it == state.variables.end()) {
        throw Error(ErrorCode::UnknownVariable, "no session variable " + var);
    }
    if (std::holds_alternative<std::optional<BoundingBox>>(it->second)) {
        throw Error(ErrorCode::InvalidArgument, var + " is a bounding box");
    }
    std::vector<double> values;
    for (const auto& e : planner::geometries_of(it->second)) {
        values.push_back(area_m2(e.geometry));
    }
    std::optional<std::size_t> bins;
    if (req.contains("bins") && req["bins"].is_number_integer() && req["bins"].get<long long>() > 0) {
        bins = req["bins"].get<std::size_t>();
    }
    std::string title = req.value("title", std::string());
    if (title.empty()) {
        title = "Area distribution of " + var;
    }
    return make_histogram(values, bins, title, "area (m²)");
}

ExplainResult Explainer::explain(planner::SessionState& state, const std::string& prompt) {
    agent::CompletionRequest req;
    req.role = agent::AgentRole::Explainer;
    req.system_slots["context"] = session_context(state);
    req.context = state.history;
    req.user_content = prompt;
    std::optional<GraphRows> last_rows;

    for (int iter = 1; iter <= max_iterations_; ++iter) {
        const agent::CompletionResponse resp = gateway_->complete(state.id, req);
        const std::string& reply = resp.text;
        std::string feedback;
        if (auto block = agent::last_block(reply, "cypher")) {
            try {
                const GraphQuery q = parse_graph_query(block->body);
                last_rows = run_graph_query(store_->snapshot()->graph, q);
                feedback = "question: " + prompt + "\nquery: " + q.to_text() + "\nresult:\n" + last_rows->render();
            } catch (const Error& e) {
                feedback = "question: " + prompt + "\nquery error (" + std::string(to_string(e.code())) + "): " + e.what();
            }
        } else if (auto chart = agent::last_block(reply, "chart")) {
            try {
                ExplainResult r;
                r.kind = ExplainResult::Kind::Chart;
                r.chart = chart_from_request(state, agent::extract_json("```json\n" + chart->body + "\n```"));
                r.text = prose(reply);
                r.iterations = iter;
                return r;
            } catch (const Error& e) {
                feedback = "question: " + prompt + "\nchart error (" + std::string(to_string(e.code())) + "): " + e.what();
            }
        } else {
            ExplainResult r;
            r.text = trimmed(reply);
            r.iterations = iter;
            if (last_rows) {
                r.kind = ExplainResult::Kind::Table;
                r.table = std::move(last_rows);
            }
            return r;
        }
        req.context.push_back({"user", req.user_content});
        req.context.push_back({"assistant", reply});
        req.user_content = feedback;
    }
    throw Error(ErrorCode::IterationLimit,
                "explainer gave no final answer within " + std::to_string(max_iterations_) + " iterations");
}

}  // namespace geoqa::explainer
