#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoqa::store {

inline constexpr const char* kDatabaseNode = "database";
inline constexpr const char* kTableNode = "table";
inline constexpr const char* kNameValueNode = "name_column_value";
inline constexpr const char* kCategoryValueNode = "category_column_value";
inline constexpr const char* kReverseSuffix = "_reverse";

struct GraphNode {
    std::string type;
    std::string id;
    friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
    std::string edge_type;
    std::size_t source = 0;  // node indices
    std::size_t target = 0;
    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Typed property graph over the schema. Nodes are unique by (type, id);
/// every forward edge is stored together with its "_reverse" twin.
class SchemaGraph {
public:
    /// Index of the node, adding it if absent.
    std::size_t add_node(const std::string& type, const std::string& id);
    std::optional<std::size_t> find_node(const std::string& type, const std::string& id) const;

    /// Adds source -edge_type-> target and target -edge_type_reverse-> source
    /// unless already present.
    void link(const std::string& edge_type, std::size_t source, std::size_t target);

    const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
    const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
    const GraphNode& node(std::size_t i) const { return nodes_.at(i); }

    /// Edge indices leaving `node`, in insertion order.
    std::vector<std::size_t> out_edges(std::size_t node) const;
    /// Targets reachable over one edge of `edge_type` (any type when empty).
    std::vector<std::size_t> neighbors(std::size_t node, const std::string& edge_type = {}) const;

    bool has_edge_type(const std::string& edge_type) const;
    std::vector<std::string> node_types() const;
    std::vector<std::string> edge_types() const;

    /// {"nodes": [{type, id}], "links": [{edge_type, source, target}]} with
    /// node indices as endpoints.
    nlohmann::json to_json() const;
    static SchemaGraph from_json(const nlohmann::json& j);

private:
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
    std::map<std::pair<std::string, std::string>, std::size_t> node_index_;
    std::map<std::size_t, std::vector<std::size_t>> out_;
};

}  // namespace geoqa::store
