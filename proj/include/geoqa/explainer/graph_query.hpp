#pragma once

#include "geoqa/store/schema_graph.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoqa::explainer {

// Grammar (keywords case-insensitive):
//
//   query      := MATCH node [ hop node ] RETURN projection { "," projection } [";"]
//   node       := "(" [ var ] [ ":" name ] [ "{" prop { "," prop } "}" ] ")"
//   prop       := ( "type" | "id" ) ":" string
//   hop        := "-" "[" [ var ] [ ":" name ] "]" "->"  |  "-->"
//   projection := var [ "." ( "id" | "type" ) ]
//
// (n:table) is shorthand for (n {type:'table'}). A bare variable projects its
// id. WHERE, ORDER BY, LIMIT, aggregation, left arrows and a second hop are
// rejected with Error(UnsupportedFeature); anything else malformed with
// PositionedError(GraphQuerySyntax).

struct NodePattern {
    std::string var;
    std::optional<std::string> type;
    std::optional<std::string> id;
    friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

struct Projection {
    std::string var;
    std::string attribute;  // "id" | "type"
    friend bool operator==(const Projection&, const Projection&) = default;
};

struct GraphQuery {
    NodePattern from;
    std::optional<std::string> edge_type;  // set only with a hop; "" = any type
    std::optional<NodePattern> to;
    std::vector<Projection> projections;

    /// Canonical text; parse_graph_query(to_text()) == *this.
    std::string to_text() const;
    friend bool operator==(const GraphQuery&, const GraphQuery&) = default;
};

struct GraphRows {
    std::vector<std::string> columns;  // "a.id", ...
    std::vector<std::vector<std::string>> rows;

    nlohmann::json to_json() const;
    /// One row per line, cells joined by " | ".
    std::string render() const;
};

/// Parses a bare query or the last ```cypher block of an agent reply.
GraphQuery parse_graph_query(std::string_view text);

/// Rows in node insertion order (then edge insertion order for hops).
/// Throws Error(UnknownEdgeType) for an edge type absent from the graph.
GraphRows run_graph_query(const store::SchemaGraph& graph, const GraphQuery& q);

}  // namespace geoqa::explainer
