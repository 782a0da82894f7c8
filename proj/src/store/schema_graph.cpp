#include "geoqa/store/schema_graph.hpp"

#include "geoqa/error.hpp"

#include <set>

namespace geoqa::store {

std::size_t SchemaGraph::add_node(const std::string& type, const std::string& id) {
    auto [it, added] = node_index_.try_emplace({type, id}, nodes_.size());
    if (added) {
        nodes_.push_back({type, id});
    }
    return it->second;
}

std::optional<std::size_t> SchemaGraph::find_node(const std::string& type, const std::string& id) const {
    auto it = node_index_.find({type, id});
    if (it == node_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void SchemaGraph::link(const std::string& edge_type, std::size_t source, std::size_t target) {
    if (source >= nodes_.size() || target >= nodes_.size()) {
        throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    for (std::size_t e : out_[source]) {
        if (edges_[e].edge_type == edge_type && edges_[e].target == target) {
            return;
        }
    }
    out_[source].push_back(edges_.size());
    edges_.push_back({edge_type, source, target});
    out_[target].push_back(edges_.size());
    edges_.push_back({edge_type + kReverseSuffix, target, source});
}

std::vector<std::size_t> SchemaGraph::out_edges(std::size_t node) const {
    auto it = out_.find(node);
    return it == out_.end() ? std::vector<std::size_t>{} : it->second;
}

std::vector<std::size_t> SchemaGraph::neighbors(std::size_t node, const std::string& edge_type) const {
    std::vector<std::size_t> out;
    for (std::size_t e : out_edges(node)) {
        if (edge_type.empty() || edges_[e].edge_type == edge_type) {
            out.push_back(edges_[e].target);
        }
    }
    return out;
}

bool SchemaGraph::has_edge_type(const std::string& edge_type) const {
    for (const auto& e : edges_) {
        if (e.edge_type == edge_type) {
            return true;
        }
    }
    return false;
}

std::vector<std::string> SchemaGraph::node_types() const {
    std::set<std::string> s;
    for (const auto& n : nodes_) {
        s.insert(n.type);
    }
    return {s.begin(), s.end()};
}

std::vector<std::string> SchemaGraph::edge_types() const {
    std::set<std::string> s;
    for (const auto& e : edges_) {
        s.insert(e.edge_type);
    }
    return {s.begin(), s.end()};
}

nlohmann::json SchemaGraph::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nodes.push_back({{"type", n.type}, {"id", n.id}});
    }
    nlohmann::json links = nlohmann::json::array();
    for (const auto& e : edges_) {
        links.push_back({{"edge_type", e.edge_type}, {"source", e.source}, {"target", e.target}});
    }
    return {{"nodes", nodes}, {"links", links}};
}

SchemaGraph SchemaGraph::from_json(const nlohmann::json& j) {
    SchemaGraph g;
    for (const auto& n : j.at("nodes")) {
        g.add_node(n.at("type").get<std::string>(), n.at("id").get<std::string>());
    }
    // Reverse twins are regenerated by link().
    for (const auto& e : j.at("links")) {
        const auto type = e.at("edge_type").get<std::string>();
        const std::string_view suffix = kReverseSuffix;
        if (type.size() > suffix.size() && type.compare(type.size() - suffix.size(), suffix.size(), suffix) == 0) {
            continue;
        }
        g.link(type, e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>());
    }
    return g;
}

}  // namespace geoqa::store
