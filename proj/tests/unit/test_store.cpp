#include "geoqa/error.hpp"
#include "geoqa/geometry/geojson.hpp"
#include "geoqa/store/knowledge_store.hpp"
#include "geoqa/text.hpp"
#include "demo_docs.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace geoqa;
using namespace geoqa::store;
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

// Independent trigram-hash oracle: counts per bucket, then unit norm.
std::vector<double> oracle_trigram(const std::string& s) {
    std::string p = " ";
    for (char c : s) {
        p += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    p += " ";
    std::vector<double> v(256, 0.0);
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
        std::uint32_t h = 0x811C9DC5U;
        for (int k = 0; k < 3; ++k) {
            h = (h ^ static_cast<unsigned char>(p[i + k])) * 0x01000193U;
        }
        v[h % 256] += 1;
    }
    double n = 0;
    for (double x : v) n += x * x;
    for (double& x : v) x /= std::sqrt(n);
    return v;
}

double oracle_cos(const std::string& a, const std::string& b) {
    const auto x = oracle_trigram(a);
    const auto y = oracle_trigram(b);
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
    return d;
}

std::size_t count_type(const SchemaGraph& g, const std::string& type) {
    std::size_t n = 0;
    for (const auto& node : g.nodes()) n += node.type == type;
    return n;
}

}  // namespace

TEST_CASE("trigram embedding matches the independent oracle") {
    for (const std::string s : {"park", "parks", "qzx", "Theresienstraße", "greenery spaces", "a"}) {
        const auto v = trigram_embedding(s);
        const auto o = oracle_trigram(s);
        REQUIRE(v.size() == 256);
        double norm = 0;
        for (std::size_t i = 0; i < 256; ++i) {
            CHECK(v[i] == doctest::Approx(o[i]).epsilon(1e-6));
            norm += static_cast<double>(v[i]) * v[i];
        }
        CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(cosine(v, trigram_embedding(s)) == doctest::Approx(1.0).epsilon(1e-6));
    }
    TrigramEmbedder e;
    CHECK(e.embed("park") == e.embed("park"));
    CHECK(cosine(e.embed("park"), e.embed("parks")) > cosine(e.embed("park"), e.embed("qzx")));
    CHECK(oracle_cos("park", "parks") > oracle_cos("park", "qzx"));
    CHECK(code_of([&] { e.embed("   "); }) == ErrorCode::EmptyText);
}

TEST_CASE("anchored embedder places a phrase near its anchors") {
    AnchoredEmbedder e(nlohmann::json{{"texts", {{"Greenery Spaces", {{"grass", 1.0}, {"meadow", 1.0}}}}}});
    const auto q = e.embed("greenery   spaces");
    CHECK(cosine(q, e.embed("grass")) > 0.5);
    CHECK(cosine(q, e.embed("meadow")) > 0.5);
    CHECK(e.embed("other") == trigram_embedding("other"));
}

TEST_CASE("ingest builds the three stores") {
    KnowledgeStore s(std::make_shared<TrigramEmbedder>());
    const auto doc = collection({
        feature(square(0, 0, 1), {{"fclass", "park"}, {"name", "A"}}),
        feature(square(2, 0, 1), {{"fclass", "park"}, {"name", "B"}}),
    });
    const auto r = s.ingest_geojson("demo", doc);
    CHECK(r.features == 2);
    CHECK(r.skipped.empty());
    CHECK(r.tables == 1);
    CHECK(r.embedded_values == 4);  // table keyword, category, two names
    const auto snap = s.snapshot();
    CHECK(count_type(snap->graph, kDatabaseNode) == 1);
    CHECK(count_type(snap->graph, kTableNode) == 1);
    CHECK(count_type(snap->graph, kNameValueNode) == 2);
    CHECK(count_type(snap->graph, kCategoryValueNode) == 1);
    CHECK(snap->graph.has_edge_type("table_fclass"));
    CHECK(snap->graph.has_edge_type("table_fclass_reverse"));
    const auto keys = snap->tables[0].geometries.keys();
    CHECK(keys == std::vector<std::string>{"demo_park_A_1", "demo_park_B_2"});
}

TEST_CASE("bad features are skipped, not fatal") {
    KnowledgeStore s(std::make_shared<TrigramEmbedder>());
    auto doc = collection({
        feature(nullptr, {{"name", "nowhere"}}),
        feature(square(0, 0, 1), {{"name", "ok"}}),
        feature({{"type", "Polygon"}, {"coordinates", {{{0, 0}, {1, 1}}}}}, {{"name", "bad ring"}}),
        feature({{"type", "GeometryCollection"}, {"coordinates", nlohmann::json::array()}}, {}),
    });
    const auto r = s.ingest_geojson("demo", doc);
    CHECK(r.features == 4);
    REQUIRE(r.skipped.size() == 3);
    CHECK(r.skipped[0].first == 0);
    CHECK(r.skipped[1].first == 2);
    CHECK(r.skipped[2].first == 3);
    CHECK(r.features == s.snapshot()->tables[0].geometries.size() + r.skipped.size());
    // no category: type is the singular table name
    CHECK(s.snapshot()->tables[0].geometries[0].key_text == "demo_demo_ok_2");

    CHECK(code_of([&] { s.ingest_geojson("x", nlohmann::json{{"type", "Feature"}}); }) ==
          ErrorCode::NotFeatureCollection);
    CHECK(code_of([&] { s.ingest_geojson("other", doc, "demo"); }) == ErrorCode::TableConflict);
}

TEST_CASE("re-ingest is idempotent") {
    auto s = demo_store();
    const auto before = s->digest();
    s->ingest_geojson("roads", roads_doc());
    s->ingest_geojson("land", land_doc(), "area");
    CHECK(s->digest() == before);
    auto fresh = demo_store();
    CHECK(fresh->digest() == before);
}

TEST_CASE("graph invariants") {
    auto s = demo_store();
    const auto snap = s->snapshot();
    const auto& g = snap->graph;
    for (std::size_t n = 0; n < g.nodes().size(); ++n) {
        const auto& node = g.node(n);
        if (node.type == kTableNode) {
            std::size_t dbs = 0;
            for (auto m : g.neighbors(n)) dbs += g.node(m).type == kDatabaseNode;
            CHECK(dbs == 1);
        }
        if (node.type == kNameValueNode || node.type == kCategoryValueNode) {
            std::size_t tables = 0;
            for (auto m : g.neighbors(n)) tables += g.node(m).type == kTableNode;
            CHECK(tables >= 1);
        }
    }
    // exactly one reverse per forward edge, and out-then-back returns home
    std::size_t forward = 0;
    for (const auto& e : g.edges()) {
        const bool rev = e.edge_type.size() > 8 && e.edge_type.ends_with("_reverse");
        if (rev) continue;
        ++forward;
        std::size_t twins = 0;
        for (const auto& f : g.edges()) {
            twins += f.edge_type == e.edge_type + "_reverse" && f.source == e.target && f.target == e.source;
        }
        CHECK(twins == 1);
    }
    CHECK(g.edges().size() == 2 * forward);
    CHECK(SchemaGraph::from_json(g.to_json()).edges() == g.edges());

    // every key resolves to exactly one (database, table)
    for (const auto& t : snap->tables) {
        for (const auto& e : t.geometries) {
            const auto owner = s->resolve(e.key_text);
            REQUIRE(owner.has_value());
            CHECK(owner->first == t.database);
            CHECK(owner->second == t.name);
            const auto db = g.find_node(kDatabaseNode, owner->first);
            const auto tn = g.find_node(kTableNode, owner->second);
            REQUIRE(db);
            REQUIRE(tn);
            const auto nb = g.neighbors(*db, "database_table");
            CHECK(std::count(nb.begin(), nb.end(), *tn) == 1);
        }
    }
}

TEST_CASE("similarity search") {
    auto s = demo_store();
    const auto hits = s->similarity_search("Theresien", 50, std::nullopt, {MatchKind::EntryName});
    std::vector<std::string> values;
    for (const auto& h : hits) values.push_back(h.value);
    for (const std::string want : {"Theresienwiese", "Theresienstraße", "Theresienweg"}) {
        CHECK(std::find(values.begin(), values.end(), want) != values.end());
    }

    const auto exact = s->similarity_search("Krone-Villa");
    REQUIRE_FALSE(exact.empty());
    CHECK(exact[0].value == "Krone-Villa");
    CHECK(exact[0].score == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(code_of([&] { s->similarity_search("x", 5, std::string("nope")); }) == ErrorCode::EmptyIndex);
}

TEST_CASE("similarity search respects k, scope and kinds") {
    auto s = demo_store();
    std::mt19937 rng(3);
    const std::vector<std::string> queries = {"park", "strasse", "Theresien", "gras", "building villa", "sand"};
    const std::vector<std::string> scopes = {"soil", "roads", "points", "area", "buildings"};
    for (int i = 0; i < 200; ++i) {
        const auto& q = queries[rng() % queries.size()];
        const std::size_t k = 1 + rng() % 6;
        std::optional<std::string> scope;
        if (rng() % 2) scope = scopes[rng() % scopes.size()];
        std::set<MatchKind> kinds;
        for (auto kind : {MatchKind::Table, MatchKind::Category, MatchKind::EntryName}) {
            if (rng() % 2) kinds.insert(kind);
        }
        std::vector<CandidateMatch> hits;
        try {
            hits = s->similarity_search(q, k, scope, kinds, -1.0);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyIndex);
            continue;
        }
        CHECK(hits.size() <= k);
        for (std::size_t j = 0; j < hits.size(); ++j) {
            if (scope) CHECK(hits[j].table == *scope);
            if (!kinds.empty()) CHECK(kinds.count(hits[j].kind));
            if (j > 0) {
                const bool ordered = hits[j - 1].score > hits[j].score ||
                                     (hits[j - 1].score == hits[j].score && hits[j - 1].value <= hits[j].value);
                CHECK(ordered);
            }
        }
    }
}

TEST_CASE("greenery spaces reaches categories through the anchor fixture") {
    auto emb = std::make_shared<AnchoredEmbedder>(AnchoredEmbedder::load(GEOQA_FIXTURE_DIR "/embeddings.json"));
    auto s = demo_store(emb);
    const auto hits = s->similarity_search("greenery spaces", 50, std::nullopt, {MatchKind::Category});
    REQUIRE(hits.size() >= 3);
    CHECK(hits[0].value == "grass");
    CHECK(hits[1].value == "meadow");
    CHECK(hits[2].value == "greengrocer");
}

TEST_CASE("keyword lookup") {
    auto s = demo_store();
    const auto b = s->keyword_lookup("building");
    // table keyword, and the category of the same spelling
    REQUIRE(b.size() == 2);
    CHECK(b[0] == KeywordHit{MatchKind::Table, "buildings", "building", true});
    CHECK(b[1].kind == MatchKind::Category);

    const auto farm = s->keyword_lookup("areas with the best soil for farming");
    REQUIRE(farm.size() == 2);
    CHECK(farm[0] == KeywordHit{MatchKind::Table, "soil", "soil", false});
    CHECK(farm[1] == KeywordHit{MatchKind::Table, "area", "area", false});

    CHECK(s->keyword_lookup("greenery spaces").empty());

    const auto park = s->keyword_lookup("park named Ludwigstraße");
    REQUIRE(park.size() == 2);
    CHECK(park[0] == KeywordHit{MatchKind::Category, "area", "park", false});
    CHECK(park[1] == KeywordHit{MatchKind::EntryName, "roads", "Ludwigstraße", false});

    const auto fk = s->keyword_lookup("frauenkirche");
    REQUIRE(fk.size() == 1);
    CHECK(fk[0].exact);
    // token-level: "area" does not fire inside "nearest"
    CHECK(s->keyword_lookup("nearest").empty());
}

TEST_CASE("get_geometries") {
    auto s = demo_store();
    const auto maxvorstadt = BoundingBox::checked(48.139603, 48.157637, 11.538923, 11.588192);
    const auto parks = s->get_geometries({"land", std::string("park"), {}}, maxvorstadt);
    CHECK(parks.keys() ==
          std::vector<std::string>{"land_park_Salinenhof_17978461", "land_park_Maximiliansplatz_144135886"});
    CHECK(s->get_geometries({"area", std::string("parks"), {}}).size() == 2);

    const auto villa = s->get_geometries({"buildings", std::nullopt, {"Krone-Villa"}});
    CHECK(villa.keys() == std::vector<std::string>{"buildings_building_Krone-Villa_153292452"});
    CHECK(s->get_geometries({"buildings", std::nullopt, {}}, maxvorstadt).size() == 2);

    CHECK(code_of([&] { s->get_geometries({"xyz", std::nullopt, {}}); }) == ErrorCode::UnknownTable);
}

TEST_CASE("snapshot persistence round-trips") {
    auto s = demo_store();
    const auto dir = std::filesystem::temp_directory_path() / "geoqa_store_test";
    std::filesystem::remove_all(dir);
    s->save(dir);
    KnowledgeStore loaded(std::make_shared<TrigramEmbedder>());
    loaded.load(dir);
    CHECK(loaded.digest() == s->digest());
    CHECK(loaded.similarity_search("Krone-Villa") == s->similarity_search("Krone-Villa"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("geojson codec round-trips") {
    for (const auto& g : {point(1, 2), square(0, 0, 1),
                          nlohmann::json{{"type", "LineString"}, {"coordinates", {{0, 0}, {1, 1}}}}}) {
        CHECK(to_geojson(geometry_from_geojson(g)) == g);
    }
    CHECK(code_of([] { geometry_from_geojson({{"type", "MultiPoint"}, {"coordinates", {{0, 0}}}}); }) ==
          ErrorCode::UnsupportedKind);
}
