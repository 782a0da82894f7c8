#include "geoqa/retriever/entity_retriever.hpp"

#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace geoqa::retriever {

namespace {

CandidateMatch from_hit(const store::KeywordHit& h) { return {h.kind, h.table, h.value, 1.0}; }

// Strings from a JSON array; anything else is a malformed decision.
std::vector<std::string> string_list(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) {
        throw Error(ErrorCode::MalformedDecision, std::string("decision lacks the list \"") + key + "\"");
    }
    std::vector<std::string> out;
    for (const auto& v : j[key]) {
        if (v.is_string()) {
            out.push_back(v.get<std::string>());
        } else if (v.is_object() && v.contains("value") && v["value"].is_string()) {
            out.push_back(v["value"].get<std::string>());
        } else {
            throw Error(ErrorCode::MalformedDecision, std::string("non-string entry in \"") + key + "\"");
        }
    }
    return out;
}

// Candidates named by the agent, in input order. A name matches a
// candidate's label ("category:park") or its bare value.
std::vector<CandidateMatch> pick(const std::vector<CandidateMatch>& input, const std::vector<std::string>& names) {
    std::set<std::string> wanted;
    for (const auto& n : names) {
        wanted.insert(text::collapse_whitespace(n));
    }
    std::vector<CandidateMatch> out;
    for (const auto& c : input) {
        if (wanted.count(c.label()) || wanted.count(c.value)) {
            out.push_back(c);
        }
    }
    return out;
}

std::string value_list(const std::vector<CandidateMatch>& c, MatchKind kind) {
    std::vector<std::string> v;
    for (const auto& m : c) {
        if (m.kind == kind) {
            v.push_back(m.value);
        }
    }
    return "[" + text::join(v, ", ") + "]";
}

// "Matched categories: [...]; Matched names: [...]", or "None".
std::string kinds_summary(const std::vector<CandidateMatch>& c, const std::string& verb) {
    std::vector<std::string> parts;
    for (const auto& [kind, label] : {std::pair{MatchKind::Table, "tables"}, std::pair{MatchKind::Category, "categories"},
                                      std::pair{MatchKind::EntryName, "names"}}) {
        if (std::any_of(c.begin(), c.end(), [k = kind](const CandidateMatch& m) { return m.kind == k; })) {
            parts.push_back(verb + " " + label + ": " + value_list(c, kind));
        }
    }
    return parts.empty() ? "None" : text::join(parts, "; ");
}

nlohmann::json candidates_json(const std::vector<CandidateMatch>& c) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : c) {
        a.push_back({{"kind", store::to_string(m.kind)}, {"table", m.table}, {"value", m.value}, {"score", m.score}});
    }
    return a;
}

TraceStage skipped(std::string stage) { return {std::move(stage), true, "-", nullptr}; }

}  // namespace

std::string_view to_string(MatchCase c) {
    switch (c) {
        case MatchCase::Exact: return "Exact";
        case MatchCase::Partial: return "Partial";
        case MatchCase::None: return "None";
    }
    return "None";
}

std::string label_list(const std::vector<CandidateMatch>& c) {
    std::vector<std::string> v;
    for (const auto& m : c) {
        v.push_back(m.label());
    }
    return "[" + text::join(v, ", ") + "]";
}

nlohmann::json RetrievalTrace::to_json() const {
    nlohmann::json stages_json = nlohmann::json::array();
    for (const auto& s : stages) {
        stages_json.push_back({{"stage", s.stage}, {"skipped", s.skipped}, {"summary", s.summary}, {"detail", s.detail}});
    }
    return {{"entity", entity}, {"stages", stages_json}};
}

std::string RetrievalTrace::render() const {
    std::string out = "Extracted entity: \"" + entity + "\"\n";
    for (std::size_t i = 0; i < stages.size(); ++i) {
        out += "- " + std::to_string(i + 1) + ". " + stages[i].stage + ": " + stages[i].summary + "\n";
    }
    return out;
}

EntityRetriever::EntityRetriever(std::shared_ptr<store::KnowledgeStore> store,
                                 std::shared_ptr<agent::AgentGateway> gateway, RetrieverOptions options)
    : store_(std::move(store)), gateway_(std::move(gateway)), options_(options) {}

MatchOutcome EntityRetriever::initial_match(std::string_view entity_text) const {
    MatchOutcome out;
    const auto hits = store_->keyword_lookup(entity_text);
    for (const auto& h : hits) {
        if (h.exact) {
            out.candidates.push_back(from_hit(h));
        }
    }
    if (!out.candidates.empty()) {
        out.match_case = MatchCase::Exact;
        return out;
    }
    for (const auto& h : hits) {
        out.candidates.push_back(from_hit(h));
    }
    out.match_case = out.candidates.empty() ? MatchCase::None : MatchCase::Partial;
    return out;
}

IntentDecision EntityRetriever::intent_match(const std::string& session, const std::string& entity_text,
                                             const MatchOutcome& outcome) {
    const auto tables = store_->table_names();
    agent::CompletionRequest req;
    req.role = agent::AgentRole::IntentMatcher;
    req.user_content = "query: " + entity_text + "\npartial matches: " + label_list(outcome.candidates);
    req.system_slots["tables"] = text::join(tables, ", ");
    const auto j = gateway_->complete_json(session, req);

    IntentDecision d;
    if (!j.is_object() || !j.contains("named_entity") || !j["named_entity"].is_boolean()) {
        throw Error(ErrorCode::MalformedDecision, "intent decision lacks a boolean \"named_entity\"");
    }
    d.named_entity = j["named_entity"].get<bool>();
    d.valid_pairs = pick(outcome.candidates, string_list(j, "valid_pairs"));
    if (j.contains("table") && j["table"].is_string()) {
        const auto t = text::collapse_whitespace(j["table"].get<std::string>());
        // A table the store does not know is treated as no table.
        if (std::find(tables.begin(), tables.end(), t) != tables.end()) {
            d.table = t;
        }
    }
    return d;
}

std::vector<CandidateMatch> EntityRetriever::similarity_stage(const std::string& entity_text,
                                                              const IntentDecision& decision) const {
    const std::optional<std::string> scope =
        decision.table.empty() ? std::nullopt : std::optional<std::string>(decision.table);
    const MatchKind primary = decision.named_entity ? MatchKind::EntryName : MatchKind::Category;
    const MatchKind secondary = decision.named_entity ? MatchKind::Category : MatchKind::EntryName;
    std::vector<CandidateMatch> out;
    int empty = 0;
    for (const auto& [kind, floor] : {std::pair{primary, options_.min_score},
                                      std::pair{secondary, std::max(options_.min_score, options_.cross_kind_score)}}) {
        try {
            const auto hits = store_->similarity_search(entity_text, options_.top_k, scope, {kind}, floor);
            out.insert(out.end(), hits.begin(), hits.end());
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyIndex) {
                throw;
            }
            ++empty;
        }
    }
    if (empty == 2) {
        throw Error(ErrorCode::EmptyIndex, "no names or categories indexed" + (scope ? " for table " + *scope : ""));
    }
    std::stable_sort(out.begin(), out.end(), [](const CandidateMatch& a, const CandidateMatch& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.value < b.value;
    });
    if (out.size() > options_.top_k) {
        out.resize(options_.top_k);
    }
    return out;
}

std::vector<CandidateMatch> EntityRetriever::quality_check(const std::string& session, const std::string& entity_text,
                                                           const std::vector<CandidateMatch>& candidates) {
    if (candidates.empty()) {
        return {};
    }
    std::vector<CandidateMatch> input(candidates.begin(),
                                      candidates.begin() + static_cast<std::ptrdiff_t>(
                                                               std::min(candidates.size(), options_.top_k)));
    agent::CompletionRequest req;
    req.role = agent::AgentRole::QualityChecker;
    req.user_content = "query: " + entity_text + "\ncandidates:";
    for (const auto& c : input) {
        req.user_content += "\n" + c.label() + " (" + c.table + ")";
    }
    return pick(input, string_list(gateway_->complete_json(session, req), "valid"));
}

std::string EntityRetriever::imitation_rewrite(const std::string& session, const std::string& entity_text,
                                               const std::string& table) {
    const auto snap = store_->snapshot();
    const store::TableData* t = snap->table(table);
    if (t == nullptr) {
        throw Error(ErrorCode::UnknownTable, "unknown table " + table);
    }
    std::vector<std::string> rows;
    for (std::size_t i = 0; i < t->features.size() && rows.size() < options_.rewrite_samples; ++i) {
        rows.push_back(t->features[i].properties.dump());
    }
    agent::CompletionRequest req;
    req.role = agent::AgentRole::ImitationRewriter;
    req.user_content = "query: " + entity_text + "\ntable: " + table;
    req.system_slots["table"] = table;
    req.system_slots["samples"] = text::join(rows, "\n");
    const auto j = gateway_->complete_json(session, req);
    std::string rewrite;
    if (j.is_object() && j.contains("rewrite") && j["rewrite"].is_string()) {
        rewrite = text::collapse_whitespace(j["rewrite"].get<std::string>());
    }
    if (rewrite.empty()) {
        throw Error(ErrorCode::RewriteFailed, "imitation rewriter returned no rewrite");
    }
    return rewrite;
}

GeoSet EntityRetriever::generate_query(const std::vector<CandidateMatch>& candidates,
                                       const std::optional<BoundingBox>& box) const {
    GeoSet out;
    for (const auto& c : candidates) {
        store::Selector sel{c.table, std::nullopt, {}};
        if (c.kind == MatchKind::Category) {
            sel.category = c.value;
        } else if (c.kind == MatchKind::EntryName) {
            sel.names = {c.value};
        }
        for (const auto& e : store_->get_geometries(sel, box)) {
            out.insert(e);
        }
    }
    return out;
}

std::string EntityRetriever::cache_key(const std::string& entity_text, const std::optional<BoundingBox>& box) {
    std::string key = text::to_lower(text::collapse_whitespace(entity_text));
    if (box) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "|%.6f,%.6f,%.6f,%.6f", box->min_lat, box->max_lat, box->min_lon, box->max_lon);
        key += buf;
    }
    return key;
}

Retrieval EntityRetriever::retrieve(const std::string& session, const std::string& entity_text,
                                    const std::optional<BoundingBox>& box) {
    const std::string text = text::collapse_whitespace(entity_text);
    if (text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty entity text");
    }
    const auto snap = store_->snapshot();
    const std::string key = cache_key(text, box);
    {
        std::lock_guard lock(cache_mutex_);
        if (cached_for_ != snap) {
            cache_.clear();
            cached_for_ = snap;
        }
        if (auto it = cache_.find(key); it != cache_.end()) {
            return it->second;
        }
    }

    Retrieval r;
    r.trace.entity = text;
    const MatchOutcome outcome = initial_match(text);
    r.trace.stages.push_back({"Schema Match", false, "Matched candidates: " + label_list(outcome.candidates),
                              {{"case", to_string(outcome.match_case)}, {"candidates", candidates_json(outcome.candidates)}}});

    if (outcome.match_case == MatchCase::Exact) {
        for (const char* s : {"Intent Match", "Similarity Match", "Quality Check", "Imitation Rewrite"}) {
            r.trace.stages.push_back(skipped(s));
        }
        r.candidates = outcome.candidates;
    } else {
        const IntentDecision d = intent_match(session, text, outcome);
        std::string intent = d.named_entity ? "Name-focused Search" : "Category-focused Search";
        if (!d.valid_pairs.empty()) {
            intent += ", Valid matches: " + label_list(d.valid_pairs);
        }
        r.trace.stages.push_back({"Intent Match", false, intent,
                                  {{"named_entity", d.named_entity},
                                   {"valid_pairs", candidates_json(d.valid_pairs)},
                                   {"table", d.table}}});

        // A validated table match scopes the search like an inferred table.
        IntentDecision scoped = d;
        for (const auto& v : d.valid_pairs) {
            if (scoped.table.empty() && v.kind == MatchKind::Table) {
                scoped.table = v.table;
            } else if (v.kind != MatchKind::Table) {
                r.candidates.push_back(v);
            }
        }

        const auto sims = similarity_stage(text, scoped);
        r.trace.stages.push_back({"Similarity Match", false, kinds_summary(sims, "Matched"),
                                  {{"scope", scoped.table}, {"candidates", candidates_json(sims)}}});
        if (sims.empty()) {
            r.trace.stages.push_back(skipped("Quality Check"));
        } else {
            const auto valid = quality_check(session, text, sims);
            r.trace.stages.push_back({"Quality Check", false, kinds_summary(valid, "Valid"),
                                      {{"candidates", candidates_json(valid)}}});
            r.candidates.insert(r.candidates.end(), valid.begin(), valid.end());
        }

        if (!r.candidates.empty()) {
            r.trace.stages.push_back(skipped("Imitation Rewrite"));
        } else if (scoped.table.empty()) {
            r.trace.stages.push_back(skipped("Imitation Rewrite"));
            throw Error(ErrorCode::EntityNotFound, "no data matches \"" + text + "\"");
        } else {
            const std::string rewrite = imitation_rewrite(session, text, scoped.table);
            r.trace.stages.push_back({"Imitation Rewrite", false, "\"" + rewrite + "\"",
                                      {{"table", scoped.table}, {"rewrite", rewrite}}});
            IntentDecision again = scoped;
            again.named_entity = true;  // rows are found by their text, not by category
            const auto sims2 = similarity_stage(rewrite, again);
            r.trace.stages.push_back({"Rewrite Similarity Match", false, kinds_summary(sims2, "Matched"),
                                      {{"scope", scoped.table}, {"candidates", candidates_json(sims2)}}});
            const auto valid2 = quality_check(session, rewrite, sims2);
            r.trace.stages.push_back({"Rewrite Quality Check", sims2.empty(),
                                      sims2.empty() ? "-" : kinds_summary(valid2, "Valid"),
                                      {{"candidates", candidates_json(valid2)}}});
            r.candidates = valid2;
        }
        if (r.candidates.empty()) {
            throw Error(ErrorCode::EntityNotFound, "no data matches \"" + text + "\"");
        }
    }

    r.geometries = generate_query(r.candidates, box);
    std::lock_guard lock(cache_mutex_);
    if (cached_for_ == snap) {
        cache_.emplace(key, r);
    }
    return r;
}

}  // namespace geoqa::retriever
