#include "geoqa/store/knowledge_store.hpp"

#include "geoqa/error.hpp"
#include "geoqa/geometry/geojson.hpp"
#include "geoqa/geometry/predicates.hpp"
#include "geoqa/geometry/wkt.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace geoqa::store {

namespace {

std::optional<std::string> text_property(const nlohmann::json& props, const char* key) {
    if (!props.is_object() || !props.contains(key)) {
        return std::nullopt;
    }
    const auto& v = props[key];
    if (v.is_string()) {
        std::string s = text::collapse_whitespace(v.get<std::string>());
        if (!s.empty()) {
            return s;
        }
    }
    return std::nullopt;
}

std::optional<std::string> id_property(const nlohmann::json& v) {
    if (v.is_string() && !v.get<std::string>().empty()) {
        return v.get<std::string>();
    }
    if (v.is_number_integer()) {
        return std::to_string(v.get<long long>());
    }
    return std::nullopt;
}

std::vector<std::string> tokens_of(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in(text::normalize_term(s));
    std::string t;
    while (in >> t) {
        out.push_back(t);
    }
    return out;
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > hay.size()) {
        return false;
    }
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

const TableData& require_table(const StoreSnapshot& snap, std::string_view name) {
    if (const TableData* t = snap.table(name)) {
        return *t;
    }
    // A database name stands for its table when it has exactly one.
    const TableData* only = nullptr;
    int count = 0;
    for (const auto& t : snap.tables) {
        if (t.database == name) {
            only = &t;
            ++count;
        }
    }
    if (count == 1) {
        return *only;
    }
    throw Error(ErrorCode::UnknownTable, "unknown table " + std::string(name));
}

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) {
        throw Error(ErrorCode::Io, "truncated vector file");
    }
    return v;
}

void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& in) {
    std::string s(read_u32(in), '\0');
    in.read(s.data(), static_cast<std::streamsize>(s.size()));
    if (!in) {
        throw Error(ErrorCode::Io, "truncated vector file");
    }
    return s;
}

nlohmann::json tables_json(const std::vector<TableData>& tables) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : tables) {
        nlohmann::json features = nlohmann::json::array();
        for (std::size_t i = 0; i < t.geometries.size(); ++i) {
            const auto& e = t.geometries[i];
            const auto& f = t.features[i];
            features.push_back({{"key", e.key_text},
                                {"wkt", to_wkt(e.geometry)},
                                {"name", f.name},
                                {"category", f.category},
                                {"properties", f.properties}});
        }
        out.push_back({{"database", t.database},
                       {"table", t.name},
                       {"category_column", t.category_column},
                       {"features", features}});
    }
    return out;
}

constexpr char kVectorMagic[] = "GQVEC1\n";

}  // namespace

std::string_view to_string(MatchKind kind) {
    switch (kind) {
        case MatchKind::Table: return "table";
        case MatchKind::Category: return "category";
        case MatchKind::EntryName: return "entry_name";
    }
    return "table";
}

MatchKind parse_match_kind(std::string_view text) {
    if (text == "table") return MatchKind::Table;
    if (text == "category") return MatchKind::Category;
    if (text == "entry_name") return MatchKind::EntryName;
    throw Error(ErrorCode::InvalidArgument, "unknown match kind " + std::string(text));
}

std::string CandidateMatch::label() const { return std::string(to_string(kind)) + ":" + value; }

nlohmann::json IngestReport::to_json() const {
    nlohmann::json sk = nlohmann::json::array();
    for (const auto& [i, reason] : skipped) {
        sk.push_back({{"index", i}, {"reason", reason}});
    }
    return {{"dataset", dataset}, {"table", table},           {"tables", tables},
            {"features", features}, {"embedded_values", embedded_values}, {"skipped", sk}};
}

std::string TableData::keyword() const { return text::singularize(name); }

std::vector<std::string> TableData::categories() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& f : features) {
        if (!f.category.empty() && seen.insert(f.category).second) {
            out.push_back(f.category);
        }
    }
    return out;
}

std::vector<std::string> TableData::names() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& f : features) {
        if (!f.name.empty() && seen.insert(f.name).second) {
            out.push_back(f.name);
        }
    }
    return out;
}

const TableData* StoreSnapshot::table(std::string_view name) const {
    for (const auto& t : tables) {
        if (t.name == name) {
            return &t;
        }
    }
    return nullptr;
}

KnowledgeStore::KnowledgeStore(std::shared_ptr<Embedder> embedder)
    : embedder_(std::move(embedder)), current_(std::make_shared<StoreSnapshot>()) {}

std::shared_ptr<const StoreSnapshot> KnowledgeStore::snapshot() const {
    std::lock_guard lock(read_mutex_);
    return current_;
}

void KnowledgeStore::publish(std::shared_ptr<const StoreSnapshot> next) {
    std::lock_guard lock(read_mutex_);
    current_ = std::move(next);
}

Vector KnowledgeStore::embed(std::string_view text) const { return embedder_->embed(text); }

IngestReport KnowledgeStore::ingest_geojson(const std::string& dataset, const nlohmann::json& document,
                                            const std::string& table_name) {
    if (!document.is_object() || document.value("type", "") != "FeatureCollection" ||
        !document.contains("features") || !document["features"].is_array()) {
        throw Error(ErrorCode::NotFeatureCollection, "document is not a GeoJSON FeatureCollection");
    }
    if (dataset.empty()) {
        throw Error(ErrorCode::InvalidArgument, "dataset name is empty");
    }
    const std::string name = table_name.empty() ? dataset : table_name;

    std::lock_guard writer(write_mutex_);
    const auto base = snapshot();
    if (const TableData* existing = base->table(name); existing && existing->database != dataset) {
        throw Error(ErrorCode::TableConflict,
                    "table " + name + " already belongs to dataset " + existing->database);
    }

    TableData table;
    table.database = dataset;
    table.name = name;
    IngestReport report;
    report.dataset = dataset;
    report.table = name;
    report.tables = 1;

    const auto& features = document["features"];
    report.features = features.size();
    const std::string fallback_type = text::singularize(name);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        if (!f.is_object() || !f.contains("geometry") || f["geometry"].is_null()) {
            report.skipped.emplace_back(i, "missing geometry");
            continue;
        }
        std::optional<Geometry> geom;
        try {
            geom = geometry_from_geojson(f["geometry"]);
        } catch (const Error& e) {
            report.skipped.emplace_back(i, std::string("invalid geometry: ") + e.what());
            continue;
        }
        const nlohmann::json props = f.contains("properties") && f["properties"].is_object()
                                         ? f["properties"]
                                         : nlohmann::json::object();
        FeatureInfo info;
        info.properties = props;
        info.name = text_property(props, "name").value_or(text_property(props, "description").value_or(""));
        for (const char* col : {"fclass", "category"}) {
            if (auto c = text_property(props, col)) {
                info.category = *c;
                if (table.category_column.empty()) {
                    table.category_column = col;
                }
                break;
            }
        }
        std::optional<std::string> id;
        for (const char* col : {"osm_id", "id"}) {
            if (!id && props.contains(col)) {
                id = id_property(props[col]);
            }
        }
        if (!id && f.contains("id")) {
            id = id_property(f["id"]);
        }
        EntityKey key{dataset, info.category.empty() ? fallback_type : info.category, info.name,
                      id.value_or(std::to_string(i + 1))};
        if (!table.geometries.insert(key, *geom)) {
            report.skipped.emplace_back(i, "duplicate key " + key.serialize());
            continue;
        }
        table.features.push_back(std::move(info));
    }

    std::vector<TableData> tables = base->tables;
    auto slot = std::find_if(tables.begin(), tables.end(), [&](const TableData& t) { return t.name == name; });
    if (slot == tables.end()) {
        tables.push_back(std::move(table));
    } else {
        *slot = std::move(table);
    }
    auto next = rebuild(std::move(tables));
    for (const auto& r : next->vectors) {
        if (r.table == name) {
            ++report.embedded_values;
        }
    }
    publish(std::move(next));
    return report;
}

std::shared_ptr<StoreSnapshot> KnowledgeStore::rebuild(std::vector<TableData> tables) {
    auto snap = std::make_shared<StoreSnapshot>();
    snap->tables = std::move(tables);
    auto embed_cached = [&](const std::string& s) -> const Vector& {
        auto it = embed_cache_.find(s);
        if (it == embed_cache_.end()) {
            it = embed_cache_.emplace(s, embedder_->embed(s)).first;
        }
        return it->second;
    };
    for (std::size_t ti = 0; ti < snap->tables.size(); ++ti) {
        const TableData& t = snap->tables[ti];
        auto& g = snap->graph;
        const auto db = g.add_node(kDatabaseNode, t.database);
        const auto tn = g.add_node(kTableNode, t.name);
        g.link("database_table", db, tn);
        snap->vectors.push_back({t.keyword(), MatchKind::Table, t.name, embed_cached(t.keyword())});
        const std::string cat_edge = "table_" + (t.category_column.empty() ? std::string("category") : t.category_column);
        for (const auto& c : t.categories()) {
            g.link(cat_edge, tn, g.add_node(kCategoryValueNode, c));
            snap->vectors.push_back({c, MatchKind::Category, t.name, embed_cached(c)});
        }
        for (const auto& n : t.names()) {
            g.link("table_name", tn, g.add_node(kNameValueNode, n));
            snap->vectors.push_back({n, MatchKind::EntryName, t.name, embed_cached(n)});
        }
        for (const auto& e : t.geometries) {
            snap->key_table[e.key_text] = ti;
        }
    }
    return snap;
}

std::vector<CandidateMatch> KnowledgeStore::similarity_search(std::string_view query, std::size_t k,
                                                              const std::optional<std::string>& scope,
                                                              const std::set<MatchKind>& kinds,
                                                              double min_score) const {
    const auto snap = snapshot();
    std::vector<const VectorRecord*> pool;
    for (const auto& r : snap->vectors) {
        if ((!scope || r.table == *scope) && (kinds.empty() || kinds.count(r.kind))) {
            pool.push_back(&r);
        }
    }
    if (pool.empty()) {
        throw Error(ErrorCode::EmptyIndex, "no indexed values" + (scope ? " for table " + *scope : std::string()));
    }
    const Vector q = embedder_->embed(query);
    std::vector<CandidateMatch> out;
    for (const VectorRecord* r : pool) {
        const double s = cosine(q, r->vector);
        if (s >= min_score) {
            out.push_back({r->kind, r->table, r->text, s});
        }
    }
    std::sort(out.begin(), out.end(), [](const CandidateMatch& a, const CandidateMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.value != b.value) return a.value < b.value;
        if (a.table != b.table) return a.table < b.table;
        return a.kind < b.kind;
    });
    if (out.size() > k) {
        out.resize(k);
    }
    return out;
}

std::vector<KeywordHit> KnowledgeStore::keyword_lookup(std::string_view term) const {
    const auto snap = snapshot();
    const auto term_tokens = tokens_of(term);
    std::vector<KeywordHit> by_kind[3];
    auto consider = [&](MatchKind kind, const std::string& table, const std::string& value) {
        const auto kw = tokens_of(value);
        if (kw.empty()) {
            return;
        }
        if (kw == term_tokens) {
            by_kind[static_cast<int>(kind)].push_back({kind, table, value, true});
        } else if (contains_run(term_tokens, kw)) {
            by_kind[static_cast<int>(kind)].push_back({kind, table, value, false});
        }
    };
    for (const auto& t : snap->tables) {
        consider(MatchKind::Table, t.name, t.keyword());
    }
    for (const auto& t : snap->tables) {
        for (const auto& c : t.categories()) {
            consider(MatchKind::Category, t.name, c);
        }
    }
    for (const auto& t : snap->tables) {
        for (const auto& n : t.names()) {
            consider(MatchKind::EntryName, t.name, n);
        }
    }
    std::vector<KeywordHit> out;
    for (auto& v : by_kind) {
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

GeoSet KnowledgeStore::get_geometries(const Selector& selector, const std::optional<BoundingBox>& box) const {
    const auto snap = snapshot();
    const TableData& t = require_table(*snap, selector.table);
    std::set<std::string> names;
    for (const auto& n : selector.names) {
        names.insert(text::normalize_term(n));
    }
    const std::string category = selector.category ? text::normalize_term(*selector.category) : std::string();
    const std::optional<Geometry> region = box ? std::optional<Geometry>(Geometry::box(*box)) : std::nullopt;
    GeoSet out;
    for (std::size_t i = 0; i < t.geometries.size(); ++i) {
        const auto& e = t.geometries[i];
        const auto& f = t.features[i];
        if (selector.category && text::normalize_term(f.category) != category) {
            continue;
        }
        if (!names.empty() && !names.count(text::normalize_term(f.name))) {
            continue;
        }
        // Cheap bbox test first, then the real shape against the box.
        if (box && (!box->intersects(e.geometry.bbox()) || !intersects(e.geometry, *region))) {
            continue;
        }
        out.insert(e);
    }
    return out;
}

std::optional<std::pair<std::string, std::string>> KnowledgeStore::resolve(const std::string& key_text) const {
    const auto snap = snapshot();
    auto it = snap->key_table.find(key_text);
    if (it == snap->key_table.end()) {
        return std::nullopt;
    }
    const auto& t = snap->tables[it->second];
    return std::make_pair(t.database, t.name);
}

std::vector<std::string> KnowledgeStore::table_names() const {
    std::vector<std::string> out;
    for (const auto& t : snapshot()->tables) {
        out.push_back(t.name);
    }
    return out;
}

bool KnowledgeStore::has_table(std::string_view name) const { return snapshot()->table(name) != nullptr; }

std::string KnowledgeStore::digest() const {
    const auto snap = snapshot();
    nlohmann::json vecs = nlohmann::json::array();
    for (const auto& r : snap->vectors) {
        const std::string_view bytes(reinterpret_cast<const char*>(r.vector.data()), r.vector.size() * sizeof(float));
        vecs.push_back({to_string(r.kind), r.table, r.text, text::sha256_hex(bytes)});
    }
    const nlohmann::json all = {{"tables", tables_json(snap->tables)}, {"graph", snap->graph.to_json()}, {"vectors", vecs}};
    return text::sha256_hex(all.dump());
}

void KnowledgeStore::save(const std::filesystem::path& dir) const {
    const auto snap = snapshot();
    std::filesystem::create_directories(dir);
    auto write_text = [&](const char* file, const std::string& body) {
        std::ofstream out(dir / file, std::ios::binary);
        out << body;
        if (!out) {
            throw Error(ErrorCode::Io, "cannot write " + (dir / file).string());
        }
    };
    write_text("tables.json", tables_json(snap->tables).dump());
    write_text("graph.json", snap->graph.to_json().dump(1));

    std::ofstream out(dir / "vectors.bin", std::ios::binary);
    out.write(kVectorMagic, sizeof kVectorMagic - 1);
    write_u32(out, static_cast<std::uint32_t>(snap->vectors.size()));
    write_u32(out, static_cast<std::uint32_t>(embedder_->dimension()));
    for (const auto& r : snap->vectors) {
        out.put(static_cast<char>(r.kind));
        write_str(out, r.table);
        write_str(out, r.text);
        out.write(reinterpret_cast<const char*>(r.vector.data()),
                  static_cast<std::streamsize>(r.vector.size() * sizeof(float)));
    }
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + (dir / "vectors.bin").string());
    }
}

void KnowledgeStore::load(const std::filesystem::path& dir) {
    auto read_json = [&](const char* file) {
        std::ifstream in(dir / file);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot read " + (dir / file).string());
        }
        return nlohmann::json::parse(in);
    };
    std::lock_guard writer(write_mutex_);
    auto snap = std::make_shared<StoreSnapshot>();
    for (const auto& tj : read_json("tables.json")) {
        TableData t;
        t.database = tj.at("database").get<std::string>();
        t.name = tj.at("table").get<std::string>();
        t.category_column = tj.at("category_column").get<std::string>();
        for (const auto& fj : tj.at("features")) {
            const auto key_text = fj.at("key").get<std::string>();
            GeoSet::Entry e{EntityKey::parse(key_text), key_text, parse_wkt(fj.at("wkt").get<std::string>())};
            t.geometries.insert(e);
            t.features.push_back({fj.at("name").get<std::string>(), fj.at("category").get<std::string>(),
                                  fj.at("properties")});
        }
        snap->tables.push_back(std::move(t));
    }
    for (std::size_t ti = 0; ti < snap->tables.size(); ++ti) {
        for (const auto& e : snap->tables[ti].geometries) {
            snap->key_table[e.key_text] = ti;
        }
    }
    snap->graph = SchemaGraph::from_json(read_json("graph.json"));

    std::ifstream in(dir / "vectors.bin", std::ios::binary);
    char magic[sizeof kVectorMagic - 1] = {};
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kVectorMagic, sizeof magic) != 0) {
        throw Error(ErrorCode::Io, "not a vector snapshot: " + (dir / "vectors.bin").string());
    }
    const std::uint32_t count = read_u32(in);
    const std::uint32_t dim = read_u32(in);
    if (dim != embedder_->dimension()) {
        throw Error(ErrorCode::Io, "vector snapshot has dimension " + std::to_string(dim) + ", embedder has " +
                                       std::to_string(embedder_->dimension()));
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        VectorRecord r;
        const int kind = in.get();
        if (kind < 0 || kind > 2) {
            throw Error(ErrorCode::Io, "corrupt vector record");
        }
        r.kind = static_cast<MatchKind>(kind);
        r.table = read_str(in);
        r.text = read_str(in);
        r.vector.resize(dim);
        in.read(reinterpret_cast<char*>(r.vector.data()), static_cast<std::streamsize>(dim * sizeof(float)));
        if (!in) {
            throw Error(ErrorCode::Io, "truncated vector file");
        }
        embed_cache_.emplace(r.text, r.vector);
        snap->vectors.push_back(std::move(r));
    }
    publish(std::move(snap));
}

}  // namespace geoqa::store
