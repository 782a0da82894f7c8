#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/agent/transcript.hpp"
#include "geoqa/geometry/predicates.hpp"
#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace geoqa::eval {

struct EntitySpec {
    std::string table;
    std::string category;
    std::optional<std::string> name;
    friend bool operator==(const EntitySpec&, const EntitySpec&) = default;
};

/// entities[subject] relates to entities[object].
struct CaseRelation {
    SpatialOpSpec spec;
    std::size_t subject = 0;
    std::size_t object = 0;
    friend bool operator==(const CaseRelation&, const CaseRelation&) = default;
};

/// Relations form a chain: entity i relates to entity i + 1. The answer is
/// the set of entity-0 rows for which the whole chain can be satisfied.
struct EvalCase {
    int tier = 1;
    std::vector<EntitySpec> entities;
    std::vector<CaseRelation> relations;
    std::string nl_query;
    std::set<std::string> truth_keys;

    nlohmann::json to_json() const;
    static EvalCase from_json(const nlohmann::json& j);
    friend bool operator==(const EvalCase&, const EvalCase&) = default;
};

struct GenConfig {
    int tier = 1;
    std::size_t n_entities = 2;
    bool named = false;  // tier 2 names every entity; tiers 3 and 4 the last one
    std::size_t count = 10;
    std::uint64_t seed = 7;
};

/// Tier 1: two categories. Tier 2: two named entities. Tiers 3 and 4: three
/// and four entities, the last one named.
GenConfig tier_config(int tier, std::size_t count, std::uint64_t seed);

/// `count` cases whose oracle answer is non-empty and whose query texts are
/// distinct. Throws Error(InsufficientData) when the store cannot supply
/// them, Error(InvalidArgument) for a bad config.
std::vector<EvalCase> generate_cases(const store::StoreSnapshot& snapshot, const GenConfig& config);

/// Brute force over every row of each entity and every pair along the
/// chain; no index, no agents.
std::set<std::string> oracle(const store::StoreSnapshot& snapshot, const EvalCase& c);

/// Natural-language noun for a category ("clothes" -> "clothes shop").
std::string category_noun(const std::string& table, const std::string& category);
std::string plural(const std::string& noun);

/// Relation wording used in queries ("within 500 meters of", "that contains").
std::string relation_phrase(const SpatialOpSpec& spec, int variant);

/// Deterministic template wording of the case. Different seeds may choose
/// different relation phrasings; the category word always appears verbatim.
std::string paraphrase(const EvalCase& c, std::uint64_t seed);

/// Asks a chat backend to reword the template text. Opt-in; never used by
/// the offline suites.
std::string paraphrase_live(agent::CompletionBackend& backend, const EvalCase& c);

/// Agent answers an ideal agent would give for the cases: Router,
/// RelationAnalyzer, MissionPlanner (one id_list_of_entity per entity, by
/// name when named, then chained geo_filter calls) and ModifyAgent. Usage is
/// a fixed function of the texts.
agent::Transcript case_transcript(const std::vector<EvalCase>& cases);

struct RunOutcome {
    std::set<std::string> keys;
    agent::TokenUsage usage;
    std::string error;  // non-empty when the case failed
};

struct CaseScore {
    double precision = 0.0;
    double recall = 0.0;
    bool exact = false;
};

/// precision = |r ∩ t| / |r| (1 if both empty, 0 if only r is empty);
/// recall = |r ∩ t| / |t| (1 if t is empty).
CaseScore score(const std::set<std::string>& retrieved, const std::set<std::string>& truth);

struct Metrics {
    std::size_t cases = 0;
    std::size_t failures = 0;
    double precision = 0.0;  // means over cases
    double recall = 0.0;
    double accuracy = 0.0;
    double tokens_in = 0.0;  // average per case
    double tokens_out = 0.0;

    nlohmann::json to_json() const;
};

struct EvalReport {
    std::map<int, Metrics> per_tier;
    Metrics overall;
    std::vector<nlohmann::json> case_results;

    nlohmann::json to_json() const;
    /// Plain-text table, one row per tier plus the total.
    std::string table() const;
};

using CaseRunner = std::function<RunOutcome(const EvalCase&, std::size_t index)>;

/// Runs every case sequentially. Runner exceptions count as failed cases.
EvalReport evaluate(const std::vector<EvalCase>& cases, const CaseRunner& runner);

/// Aggregates already-scored outcomes (exposed for tests).
Metrics aggregate(const std::vector<CaseScore>& scores, const std::vector<RunOutcome>& outcomes);

}  // namespace geoqa::eval
