#include "geoqa/error.hpp"
#include "geoqa/explainer/explainer.hpp"
#include "geoqa/geometry/measure.hpp"
#include "demo_docs.hpp"
#include "rule_backend.hpp"

#include <doctest.h>

#include <random>

using namespace geoqa;
using namespace geoqa::explainer;
using namespace demo;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::Io;
}

std::vector<std::string> column(const GraphRows& r, std::size_t c = 0) {
    std::vector<std::string> out;
    for (const auto& row : r.rows) {
        out.push_back(row.at(c));
    }
    return out;
}

}  // namespace

TEST_CASE("graph query parser builds the documented AST") {
    GraphQuery want;
    want.from = {"n", "table", std::nullopt};
    want.projections = {{"n", "id"}};
    CHECK(parse_graph_query("MATCH (n {type:'table'}) RETURN n.id") == want);
    CHECK(parse_graph_query("match (n:table) return n") == want);
    CHECK(parse_graph_query("Sure.\n```cypher\nMATCH (n {type: \"table\"})\nRETURN n.id;\n```\n") == want);

    GraphQuery hop;
    hop.from = {"a", "table", std::nullopt};
    hop.edge_type = "table_fclass";
    hop.to = NodePattern{"b", std::nullopt, std::nullopt};
    hop.projections = {{"b", "id"}};
    CHECK(parse_graph_query("MATCH (a {type:'table'})-[r:table_fclass]->(b) RETURN b.id") == hop);

    const auto any = parse_graph_query("MATCH (a {type:'database', id:'land'})-->(b) RETURN a.id, b.type");
    CHECK(any.edge_type == std::optional<std::string>(""));
    CHECK(any.from.id == std::optional<std::string>("land"));
    CHECK(any.projections == std::vector<Projection>{{"a", "id"}, {"b", "type"}});
}

TEST_CASE("graph query parser rejects what the subset lacks") {
    CHECK(code_of([] { parse_graph_query("MATCH (a)-->(b)-->(c) RETURN c"); }) == ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (n) WHERE n.type = 'table' RETURN n.id"); }) ==
          ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (n {type:'table'}) RETURN count(n)"); }) ==
          ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (n) RETURN DISTINCT n.type"); }) == ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (a)<-[r:x]-(b) RETURN a.id"); }) == ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (n) RETURN n.id LIMIT 3"); }) == ErrorCode::UnsupportedFeature);
    CHECK(code_of([] { parse_graph_query("MATCH (a)-[*1..2]->(b) RETURN a.id"); }) == ErrorCode::UnsupportedFeature);
    // Keywords inside strings are data.
    CHECK(parse_graph_query("MATCH (n {id:'where count(x)'}) RETURN n.id").from.id == std::optional<std::string>("where count(x)"));

    CHECK(code_of([] { parse_graph_query("MATCH (n RETURN n.id"); }) == ErrorCode::GraphQuerySyntax);
    CHECK(code_of([] { parse_graph_query("MATCH (n) RETURN m.id"); }) == ErrorCode::GraphQuerySyntax);
    CHECK(code_of([] { parse_graph_query("MATCH (n) RETURN n.name"); }) == ErrorCode::GraphQuerySyntax);
    CHECK(code_of([] { parse_graph_query("MATCH (n {colour:'red'}) RETURN n.id"); }) == ErrorCode::GraphQuerySyntax);
    CHECK(code_of([] { parse_graph_query("SELECT * FROM tables"); }) == ErrorCode::GraphQuerySyntax);
    try {
        parse_graph_query("MATCH (n {type:'table') RETURN n.id");
        FAIL("no error");
    } catch (const PositionedError& e) {
        CHECK(e.code() == ErrorCode::GraphQuerySyntax);
        CHECK(e.position() == 22);
    }
}

TEST_CASE("parse of to_text is the identity on random queries") {
    std::mt19937 rng(11);
    const std::vector<std::string> vals{"table", "database", "soil", "park", "a b", "Theresienstraße"};
    auto opt = [&]() -> std::optional<std::string> {
        if (rng() % 2) {
            return std::nullopt;
        }
        return vals[rng() % vals.size()];
    };
    for (int i = 0; i < 300; ++i) {
        GraphQuery q;
        q.from = {"a", opt(), opt()};
        std::vector<std::string> vars{"a"};
        if (rng() % 2) {
            q.edge_type = rng() % 3 ? "table_fclass" : "";
            q.to = NodePattern{"b", opt(), opt()};
            vars.push_back("b");
        }
        const std::size_t np = 1 + rng() % 3;
        for (std::size_t p = 0; p < np; ++p) {
            q.projections.push_back({vars[rng() % vars.size()], rng() % 2 ? "id" : "type"});
        }
        CHECK(parse_graph_query(q.to_text()) == q);
    }
}

TEST_CASE("graph queries over the demo store schema") {
    auto store = demo_store();
    const auto& g = store->snapshot()->graph;
    CHECK(column(run_graph_query(g, parse_graph_query("MATCH (n {type:'table'}) RETURN n.id"))) ==
          std::vector<std::string>{"soil", "roads", "points", "area", "buildings"});
    CHECK(column(run_graph_query(g, parse_graph_query(
              "MATCH (d {type:'database', id:'land'})-[r:database_table]->(t) RETURN t.id"))) ==
          std::vector<std::string>{"area"});
    const auto cats = column(run_graph_query(
        g, parse_graph_query("MATCH (t {type:'table', id:'area'})-[r:table_fclass]->(c) RETURN c.id")));
    CHECK(cats == std::vector<std::string>{"park", "grass", "meadow", "forest"});
    CHECK(run_graph_query(g, parse_graph_query("MATCH (n {type:'nonexistent'}) RETURN n.id")).rows.empty());
    CHECK(code_of([&] { run_graph_query(g, parse_graph_query("MATCH (a)-[r:owns]->(b) RETURN b.id")); }) ==
          ErrorCode::UnknownEdgeType);
    // The reverse edge walks back.
    CHECK(column(run_graph_query(g, parse_graph_query(
              "MATCH (c {id:'park'})-[r:table_fclass_reverse]->(t) RETURN t.id"))) ==
          std::vector<std::string>{"area"});
}

TEST_CASE("histogram examples") {
    std::vector<double> ten;
    for (int i = 0; i < 10; ++i) {
        ten.push_back(i);
    }
    const ChartSpec h = make_histogram(ten, 5);
    CHECK(h.counts == std::vector<std::size_t>{2, 2, 2, 2, 2});
    CHECK(h.bin_edges.front() == 0.0);
    CHECK(h.bin_edges.back() == 9.0);

    const ChartSpec flat = make_histogram({3, 3, 3}, 4);
    CHECK(flat.counts == std::vector<std::size_t>{3, 0, 0, 0});
    CHECK(flat.bin_edges.front() <= 3.0);
    CHECK(flat.bin_edges[1] > 3.0);

    // Sturges: 10 values -> ceil(log2 10) + 1 = 5 bins; 1 value -> 1 bin.
    CHECK(make_histogram(ten).counts.size() == 5);
    CHECK(make_histogram({42}).counts == std::vector<std::size_t>{1});
    CHECK(code_of([] { make_histogram({}); }) == ErrorCode::EmptyValues);
    CHECK(code_of([] { make_histogram({1, std::nan("")}); }) == ErrorCode::InvalidArgument);
    CHECK(ChartSpec::from_json(h.to_json()).counts == h.counts);
    CHECK(h.to_json()["version"] == 1);
}

TEST_CASE("histogram counts match a recount and conserve mass") {
    std::mt19937 rng(3);
    for (int round = 0; round < 1000; ++round) {
        const std::size_t n = 1 + rng() % 200;
        std::vector<double> v;
        std::uniform_real_distribution<double> u(-1e3, 1e6);
        for (std::size_t i = 0; i < n; ++i) {
            // Some duplicates and exact edge values.
            v.push_back(rng() % 5 == 0 && !v.empty() ? v[rng() % v.size()] : u(rng));
        }
        std::optional<std::size_t> bins;
        if (rng() % 2) {
            bins = 1 + rng() % 30;
        }
        const ChartSpec h = make_histogram(v, bins);
        REQUIRE(h.counts.size() + 1 == h.bin_edges.size());
        std::size_t total = 0;
        for (auto c : h.counts) {
            total += c;
        }
        CHECK(total == n);
        CHECK(std::is_sorted(h.bin_edges.begin(), h.bin_edges.end()));
        // Recount: half-open bins against the emitted edges, last one closed.
        std::vector<std::size_t> recount(h.counts.size(), 0);
        for (double x : v) {
            for (std::size_t b = 0; b < recount.size(); ++b) {
                const bool last = b + 1 == recount.size();
                if (x >= h.bin_edges[b] && (x < h.bin_edges[b + 1] || (last && x <= h.bin_edges[b + 1]))) {
                    ++recount[b];
                    break;
                }
            }
        }
        CHECK(recount == h.counts);
    }
}

TEST_CASE("explainer answers the dataset question through a graph query") {
    auto store = demo_store();
    auto backend = std::make_shared<RuleBackend>();
    auto gw = std::make_shared<agent::AgentGateway>(backend, agent::GatewayOptions{0, std::chrono::milliseconds(0)});
    Explainer ex(gw, store);
    backend->rules[agent::AgentRole::Explainer] = [](const agent::CompletionRequest& q) -> std::string {
        if (q.user_content == "what are the datasets we have?") {
            return "```cypher\nMATCH (n {type:'table'}) RETURN n.id\n```";
        }
        return "Explain result: 1. soil 2. roads 3. points 4. area 5. buildings";
    };
    planner::SessionState state("e1");
    const ExplainResult r = ex.explain(state, "what are the datasets we have?");
    CHECK(r.kind == ExplainResult::Kind::Table);
    CHECK(r.iterations == 2);
    REQUIRE(r.table);
    CHECK(column(*r.table) == std::vector<std::string>{"soil", "roads", "points", "area", "buildings"});
    CHECK(backend->seen.size() == 2);
    CHECK(backend->seen[1].user_content.find("result:\nsoil\nroads\npoints\narea\nbuildings\n") != std::string::npos);
    CHECK(backend->seen[1].context.size() == 2);
    CHECK(backend->seen[0].system_slots.at("context").find("No previous query results") != std::string::npos);
}

TEST_CASE("explainer feeds errors back and stops after five iterations") {
    auto store = demo_store();
    auto backend = std::make_shared<RuleBackend>();
    auto gw = std::make_shared<agent::AgentGateway>(backend, agent::GatewayOptions{0, std::chrono::milliseconds(0)});
    Explainer ex(gw, store);
    backend->rules[agent::AgentRole::Explainer] = [](const agent::CompletionRequest& q) -> std::string {
        if (q.user_content.find("UnsupportedFeature") != std::string::npos) {
            return "```cypher\nMATCH (n {type:'table'}) RETURN n.id\n```";
        }
        if (q.user_content.find("result:") != std::string::npos) {
            return "There are five tables.";
        }
        return "```cypher\nMATCH (n) WHERE n.type = 'table' RETURN n.id\n```";
    };
    planner::SessionState state("e2");
    const ExplainResult r = ex.explain(state, "tables?");
    CHECK(r.iterations == 3);
    CHECK(r.kind == ExplainResult::Kind::Table);

    backend->rules[agent::AgentRole::Explainer] = [](const agent::CompletionRequest&) {
        return std::string("```cypher\nMATCH (n) RETURN n.id\n```");
    };
    backend->seen.clear();
    CHECK(code_of([&] { ex.explain(state, "loop forever"); }) == ErrorCode::IterationLimit);
    CHECK(backend->seen.size() == 5);
}

TEST_CASE("explainer draws an area histogram of a session variable") {
    auto store = demo_store();
    auto backend = std::make_shared<RuleBackend>();
    auto gw = std::make_shared<agent::AgentGateway>(backend, agent::GatewayOptions{0, std::chrono::milliseconds(0)});
    Explainer ex(gw, store);
    planner::SessionState state("e3");
    const GeoSet buildings = store->get_geometries({"buildings", std::nullopt, {}}, std::nullopt);
    REQUIRE(buildings.size() == 3);
    state.set_variable("buildings_ids", buildings);
    backend->rules[agent::AgentRole::Explainer] = [](const agent::CompletionRequest& q) -> std::string {
        if (q.user_content.find("chart error") != std::string::npos) {
            return "Here is the chart.\n```chart\n{\"variable\": \"buildings_ids\", \"measure\": \"area\", \"bins\": null, "
                   "\"title\": \"Building areas\"}\n```";
        }
        return "```chart\n{\"variable\": \"houses\", \"measure\": \"area\"}\n```";
    };
    const ExplainResult r = ex.explain(state, "draw me a diagram for area distribution of buildings you searched");
    CHECK(r.kind == ExplainResult::Kind::Chart);
    CHECK(r.iterations == 2);
    CHECK(r.text == "Here is the chart.");
    REQUIRE(r.chart);
    CHECK(r.chart->title == "Building areas");
    CHECK(r.chart->counts.size() == 3);  // Sturges for 3 values
    std::size_t total = 0;
    for (auto c : r.chart->counts) {
        total += c;
    }
    CHECK(total == 3);
    double lo = 1e300;
    for (const auto& e : buildings) {
        lo = std::min(lo, area_m2(e.geometry));
    }
    CHECK(r.chart->bin_edges.front() == doctest::Approx(lo));
    CHECK(backend->seen[0].system_slots.at("context").find("buildings_ids: id_list, 3 entities (buildings/building 3)") !=
          std::string::npos);
}
