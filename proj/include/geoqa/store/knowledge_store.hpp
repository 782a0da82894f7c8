#pragma once

#include "geoqa/geometry/geo_set.hpp"
#include "geoqa/store/embedding.hpp"
#include "geoqa/store/schema_graph.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geoqa::store {

enum class MatchKind { Table, Category, EntryName };

std::string_view to_string(MatchKind kind);
/// "table" | "category" | "entry_name"; throws Error(InvalidArgument).
MatchKind parse_match_kind(std::string_view text);

inline constexpr std::size_t kDefaultTopK = 50;
inline constexpr double kSimilarityFloor = 0.2;

struct VectorRecord {
    std::string text;
    MatchKind kind = MatchKind::Table;
    std::string table;
    Vector vector;
};

struct CandidateMatch {
    MatchKind kind = MatchKind::Table;
    std::string table;
    std::string value;
    double score = 0.0;

    /// "kind:value", e.g. "table:soil".
    std::string label() const;
    friend bool operator==(const CandidateMatch&, const CandidateMatch&) = default;
};

struct KeywordHit {
    MatchKind kind = MatchKind::Table;
    std::string table;
    std::string value;
    bool exact = false;  // whole term equals the keyword; otherwise the keyword occurs inside the term
    friend bool operator==(const KeywordHit&, const KeywordHit&) = default;
};

struct IngestReport {
    std::string dataset;
    std::string table;
    std::size_t tables = 0;
    std::size_t features = 0;
    std::size_t embedded_values = 0;
    std::vector<std::pair<std::size_t, std::string>> skipped;

    nlohmann::json to_json() const;
};

struct FeatureInfo {
    std::string name;
    std::string category;
    nlohmann::json properties;
};

/// One ingested table. features[i] describes geometries[i].
struct TableData {
    std::string database;
    std::string name;
    std::string category_column;  // "fclass", "category" or empty
    GeoSet geometries;
    std::vector<FeatureInfo> features;

    /// Table keyword: the singularized table name.
    std::string keyword() const;
    std::vector<std::string> categories() const;  // distinct, first-seen order
    std::vector<std::string> names() const;       // distinct, first-seen order
};

struct Selector {
    std::string table;  // table name, or a database holding exactly one table
    std::optional<std::string> category;
    std::vector<std::string> names;
};

/// Immutable view of all three stores at one point in time.
struct StoreSnapshot {
    std::vector<TableData> tables;
    SchemaGraph graph;
    std::vector<VectorRecord> vectors;
    std::map<std::string, std::size_t> key_table;  // key text -> tables index

    const TableData* table(std::string_view name) const;
};

/// Geometry store, embedding index and schema graph kept in step. Readers
/// work on an immutable snapshot; ingestion builds a new snapshot and swaps it
/// in, so searches never see a half-ingested dataset.
class KnowledgeStore {
public:
    explicit KnowledgeStore(std::shared_ptr<Embedder> embedder);

    /// Ingests a FeatureCollection as table `table` (defaults to the dataset
    /// name). Re-ingesting replaces the table. Throws
    /// Error(NotFeatureCollection) and Error(TableConflict) when the table
    /// already belongs to another dataset.
    IngestReport ingest_geojson(const std::string& dataset, const nlohmann::json& document,
                                const std::string& table = {});

    Vector embed(std::string_view text) const;

    /// Top-k records by cosine similarity with score >= min_score, restricted
    /// to `scope` (a table) and `kinds` (all when empty). Throws
    /// Error(EmptyIndex) when nothing is indexed for the scope/kinds.
    std::vector<CandidateMatch> similarity_search(std::string_view query, std::size_t k = kDefaultTopK,
                                                  const std::optional<std::string>& scope = std::nullopt,
                                                  const std::set<MatchKind>& kinds = {},
                                                  double min_score = kSimilarityFloor) const;

    /// Keywords (singularized table names, categories, entry names) equal to
    /// the term or occurring in it as a contiguous run of normalized tokens.
    /// Ordered table, category, entry_name, then by ingestion order.
    std::vector<KeywordHit> keyword_lookup(std::string_view term) const;

    /// Rows matching the selector whose shape intersects `box`. Throws
    /// Error(UnknownTable).
    GeoSet get_geometries(const Selector& selector, const std::optional<BoundingBox>& box = std::nullopt) const;

    /// (database, table) owning a stored key; nullopt if unknown.
    std::optional<std::pair<std::string, std::string>> resolve(const std::string& key_text) const;

    std::shared_ptr<const StoreSnapshot> snapshot() const;
    std::vector<std::string> table_names() const;
    bool has_table(std::string_view name) const;

    /// SHA-256 over a canonical serialization of all three stores.
    std::string digest() const;

    /// Snapshot files: tables.json, graph.json, vectors.bin.
    void save(const std::filesystem::path& dir) const;
    void load(const std::filesystem::path& dir);

private:
    std::shared_ptr<Embedder> embedder_;
    mutable std::mutex read_mutex_;  // guards current_
    std::mutex write_mutex_;         // serializes ingestion and load
    std::shared_ptr<const StoreSnapshot> current_;
    std::map<std::string, Vector> embed_cache_;  // writer-side only

    std::shared_ptr<StoreSnapshot> rebuild(std::vector<TableData> tables);
    void publish(std::shared_ptr<const StoreSnapshot> next);
};

}  // namespace geoqa::store
