#pragma once

#include "geoqa/agent/gateway.hpp"
#include "geoqa/store/knowledge_store.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace geoqa::retriever {

using store::CandidateMatch;
using store::MatchKind;

enum class MatchCase { Exact, Partial, None };

std::string_view to_string(MatchCase c);

struct MatchOutcome {
    MatchCase match_case = MatchCase::None;
    std::vector<CandidateMatch> candidates;  // keyword hits, score 1
};

struct IntentDecision {
    bool named_entity = false;
    std::vector<CandidateMatch> valid_pairs;  // subset of the outcome's candidates
    std::string table;                        // known table or ""
};

struct TraceStage {
    std::string stage;
    bool skipped = false;
    std::string summary;  // one line of the rendered trace
    nlohmann::json detail;
};

struct RetrievalTrace {
    std::string entity;
    std::vector<TraceStage> stages;

    nlohmann::json to_json() const;
    /// "- 1. Schema Match: ..." one stage per line.
    std::string render() const;
};

struct Retrieval {
    GeoSet geometries;
    std::vector<CandidateMatch> candidates;  // what the query was generated from
    RetrievalTrace trace;
};

struct RetrieverOptions {
    std::size_t top_k = store::kDefaultTopK;  // also the quality checker's input cap
    double min_score = store::kSimilarityFloor;
    double cross_kind_score = 0.5;  // the de-emphasized kind must reach this
    std::size_t rewrite_samples = 20;
};

/// "kind:value" labels, as in "[table:soil, table:area]".
std::string label_list(const std::vector<CandidateMatch>& c);

class EntityRetriever {
public:
    EntityRetriever(std::shared_ptr<store::KnowledgeStore> store, std::shared_ptr<agent::AgentGateway> gateway,
                    RetrieverOptions options = {});

    MatchOutcome initial_match(std::string_view entity_text) const;

    /// IntentMatcher call. Throws Error(MalformedDecision).
    IntentDecision intent_match(const std::string& session, const std::string& entity_text,
                                const MatchOutcome& outcome);

    /// Top-k similarity hits, scoped to decision.table when set. The kind the
    /// intent points at is kept above the floor; the other kind only above
    /// cross_kind_score.
    std::vector<CandidateMatch> similarity_stage(const std::string& entity_text, const IntentDecision& decision) const;

    /// QualityChecker call; order preserved, output a subset of the input.
    std::vector<CandidateMatch> quality_check(const std::string& session, const std::string& entity_text,
                                              const std::vector<CandidateMatch>& candidates);

    /// ImitationRewriter call grounded in sample rows of `table`. Throws
    /// Error(RewriteFailed) on an empty answer.
    std::string imitation_rewrite(const std::string& session, const std::string& entity_text,
                                  const std::string& table);

    /// Union of the candidates' selectors, deduplicated, box-filtered.
    GeoSet generate_query(const std::vector<CandidateMatch>& candidates,
                          const std::optional<BoundingBox>& box) const;

    /// Full workflow with caching. Throws Error(EntityNotFound).
    Retrieval retrieve(const std::string& session, const std::string& entity_text,
                       const std::optional<BoundingBox>& box = std::nullopt);

private:
    std::shared_ptr<store::KnowledgeStore> store_;
    std::shared_ptr<agent::AgentGateway> gateway_;
    RetrieverOptions options_;
    std::mutex cache_mutex_;
    std::shared_ptr<const store::StoreSnapshot> cached_for_;
    std::map<std::string, Retrieval> cache_;

    static std::string cache_key(const std::string& entity_text, const std::optional<BoundingBox>& box);
};

}  // namespace geoqa::retriever
