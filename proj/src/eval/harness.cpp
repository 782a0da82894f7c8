#include "geoqa/eval/harness.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/analyzer/data_analyzer.hpp"
#include "geoqa/error.hpp"
#include "geoqa/planner/planner.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <sstream>

namespace geoqa::eval {

using nlohmann::json;

namespace {

struct Row {
    const store::TableData* table;
    std::size_t index;
    const GeoSet::Entry* entry;
    const store::FeatureInfo* info;
};

// Category values a retriever cannot separate from a table keyword.
bool usable_category(const store::StoreSnapshot& snap, const std::string& category) {
    if (category.empty()) {
        return false;
    }
    for (const auto& t : snap.tables) {
        if (t.keyword() == text::normalize_term(category)) {
            return false;
        }
    }
    return true;
}

// Rows of the entity, straight from the table data.
std::vector<Row> rows_of(const store::StoreSnapshot& snap, const EntitySpec& e) {
    std::vector<Row> out;
    const store::TableData* t = snap.table(e.table);
    if (t == nullptr) {
        return out;
    }
    for (std::size_t i = 0; i < t->features.size(); ++i) {
        const auto& f = t->features[i];
        if (f.category == e.category && (!e.name || f.name == *e.name)) {
            out.push_back({t, i, &t->geometries[i], &f});
        }
    }
    return out;
}

// Bounding-box test that can only reject pairs relate() would reject too.
bool may_relate(const BoundingBox& s, const BoundingBox& o, const SpatialOpSpec& spec) {
    switch (spec.spatial_type) {
        case SpatialType::Contains: return s.contains(o);
        case SpatialType::Within: return o.contains(s);
        case SpatialType::Intersects: return s.intersects(o);
        case SpatialType::Buffer: return s.intersects(o.expanded_by_meters(*spec.num));
    }
    return true;
}

std::string article(const std::string& noun) {
    const char c = noun.empty() ? 'x' : static_cast<char>(std::tolower(static_cast<unsigned char>(noun[0])));
    return std::string("aeiou").find(c) != std::string::npos ? "an " : "a ";
}

std::string entity_phrase(const EntitySpec& e, bool subject) {
    const std::string noun = category_noun(e.table, e.category);
    if (e.name) {
        return "the " + noun + " named " + *e.name;
    }
    return subject ? plural(noun) : article(noun) + noun;
}

// Text an ideal planner passes to geo_filter.
std::string filter_text(const SpatialOpSpec& spec) {
    switch (spec.spatial_type) {
        case SpatialType::Contains: return "contains";
        case SpatialType::Within: return "within";
        case SpatialType::Intersects: return "intersects";
        case SpatialType::Buffer: return "within " + text::format_number(*spec.num) + " meters of";
    }
    return "intersects";
}

agent::TokenUsage usage_for(const std::string& input, const std::string& response) {
    return {static_cast<std::int64_t>(50 + input.size() / 4), static_cast<std::int64_t>(response.size() / 4)};
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", v * 100.0);
    return buf;
}

}  // namespace

json EvalCase::to_json() const {
    json ents = json::array();
    for (const auto& e : entities) {
        json j = {{"table", e.table}, {"category", e.category}};
        if (e.name) {
            j["name"] = *e.name;
        }
        ents.push_back(j);
    }
    json rels = json::array();
    for (const auto& r : relations) {
        rels.push_back({{"spec", analyzer::to_json(r.spec)}, {"subject", r.subject}, {"object", r.object}});
    }
    return {{"tier", tier}, {"entities", ents}, {"relations", rels}, {"nl_query", nl_query}, {"truth_keys", truth_keys}};
}

EvalCase EvalCase::from_json(const json& j) {
    EvalCase c;
    try {
        c.tier = j.at("tier").get<int>();
        for (const auto& e : j.at("entities")) {
            EntitySpec s{e.at("table").get<std::string>(), e.at("category").get<std::string>(), std::nullopt};
            if (e.contains("name")) {
                s.name = e["name"].get<std::string>();
            }
            c.entities.push_back(s);
        }
        for (const auto& r : j.at("relations")) {
            c.relations.push_back({analyzer::spec_from_json(r.at("spec")), r.at("subject").get<std::size_t>(),
                                   r.at("object").get<std::size_t>()});
        }
        c.nl_query = j.at("nl_query").get<std::string>();
        c.truth_keys = j.at("truth_keys").get<std::set<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad eval case: ") + e.what());
    }
    return c;
}

GenConfig tier_config(int tier, std::size_t count, std::uint64_t seed) {
    if (tier < 1 || tier > 4) {
        throw Error(ErrorCode::InvalidArgument, "tier must be 1..4");
    }
    static const std::size_t sizes[] = {2, 2, 3, 4};
    return {tier, sizes[tier - 1], tier >= 2, count, seed};
}

std::string category_noun(const std::string& table, const std::string& category) {
    static const std::map<std::string, std::string> nouns = {
        {"grass", "grass area"},         {"farmland", "farmland area"},  {"industrial", "industrial area"},
        {"allotments", "allotments area"}, {"apartments", "apartments building"}, {"retail", "retail building"},
        {"clothes", "clothes shop"},     {"primary", "primary road"},    {"secondary", "secondary road"},
        {"tertiary", "tertiary road"},   {"residential", "residential road"}};
    if (auto it = nouns.find(category); it != nouns.end()) {
        return it->second;
    }
    (void)table;
    return category;
}

std::string plural(const std::string& noun) {
    if (noun.empty()) {
        return noun;
    }
    const auto ends = [&](const std::string& s) {
        return noun.size() >= s.size() && noun.compare(noun.size() - s.size(), s.size(), s) == 0;
    };
    if (ends("y") && noun.size() > 1 && std::string("aeiou").find(noun[noun.size() - 2]) == std::string::npos) {
        return noun.substr(0, noun.size() - 1) + "ies";
    }
    if (ends("ch") || ends("sh") || ends("s") || ends("x")) {
        return noun + "es";
    }
    return noun + "s";
}

std::string relation_phrase(const SpatialOpSpec& spec, int variant) {
    const bool alt = variant % 2 == 1;
    switch (spec.spatial_type) {
        case SpatialType::Contains: return alt ? "containing" : "that contains";
        case SpatialType::Within: return alt ? "inside" : "within";
        case SpatialType::Intersects: return alt ? "intersecting" : "that intersects";
        case SpatialType::Buffer:
            return "within " + text::format_number(*spec.num) + (alt ? " m of" : " meters of");
    }
    return "near";
}

std::string paraphrase(const EvalCase& c, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ std::stoull(text::sha256_hex(c.to_json()["entities"].dump()).substr(0, 15), nullptr, 16));
    std::string out = entity_phrase(c.entities.at(0), true);
    for (const auto& r : c.relations) {
        out += " " + relation_phrase(r.spec, static_cast<int>(rng() % 2)) + " " +
               entity_phrase(c.entities.at(r.object), false);
    }
    return out;
}

std::string paraphrase_live(agent::CompletionBackend& backend, const EvalCase& c) {
    static const std::string system =
        "Rephrase the user's geographic query the way a person would ask it. Keep every entity, name, distance "
        "and relation. Answer with one JSON block: {\"rewrite\": \"...\"}";
    agent::CompletionRequest req;
    req.role = agent::AgentRole::ImitationRewriter;
    req.user_content = paraphrase(c, 0);
    const json j = agent::extract_json(backend.complete(req, system).text);
    if (j.is_object() && j.contains("rewrite") && j["rewrite"].is_string()) {
        return j["rewrite"].get<std::string>();
    }
    throw Error(ErrorCode::RewriteFailed, "paraphrase answer lacks \"rewrite\"");
}

std::set<std::string> oracle(const store::StoreSnapshot& snapshot, const EvalCase& c) {
    if (c.entities.empty()) {
        return {};
    }
    std::vector<std::vector<Row>> sets;
    for (const auto& e : c.entities) {
        sets.push_back(rows_of(snapshot, e));
    }
    // Walk the chain from the far end: keep rows related to a kept row of the next entity.
    std::vector<Row> kept = sets.back();
    for (std::size_t i = c.entities.size() - 1; i-- > 0;) {
        const CaseRelation* rel = nullptr;
        for (const auto& r : c.relations) {
            if (r.subject == i && r.object == i + 1) {
                rel = &r;
            }
        }
        if (rel == nullptr) {
            throw Error(ErrorCode::InvalidArgument, "case relations must chain entity i to i + 1");
        }
        std::vector<Row> next;
        for (const auto& s : sets[i]) {
            for (const auto& o : kept) {
                if (relate(s.entry->geometry, o.entry->geometry, rel->spec)) {
                    next.push_back(s);
                    break;
                }
            }
        }
        kept = std::move(next);
    }
    std::set<std::string> out;
    for (const auto& r : kept) {
        out.insert(r.entry->key_text);
    }
    return out;
}

std::vector<EvalCase> generate_cases(const store::StoreSnapshot& snapshot, const GenConfig& config) {
    if (config.n_entities < 2) {
        throw Error(ErrorCode::InvalidArgument, "cases need at least two entities");
    }
    std::map<std::string, int> name_count;
    for (const auto& t : snapshot.tables) {
        for (const auto& f : t.features) {
            if (!f.name.empty()) {
                ++name_count[f.name];
            }
        }
    }
    std::vector<Row> rows;
    for (const auto& t : snapshot.tables) {
        if (t.category_column.empty()) {
            continue;  // description-only tables have no category to ask for
        }
        for (std::size_t i = 0; i < t.features.size(); ++i) {
            if (usable_category(snapshot, t.features[i].category)) {
                rows.push_back({&t, i, &t.geometries[i], &t.features[i]});
            }
        }
    }
    auto unique_name = [&](const Row& r) { return !r.info->name.empty() && name_count[r.info->name] == 1; };
    std::vector<Row> named_rows;
    std::copy_if(rows.begin(), rows.end(), std::back_inserter(named_rows), unique_name);
    if (rows.empty() || (config.named && named_rows.empty())) {
        throw Error(ErrorCode::InsufficientData, "no rows with usable categories");
    }

    std::mt19937_64 rng(config.seed * 1000003 + static_cast<std::uint64_t>(config.tier));
    const double buffers[] = {100, 200, 500};
    const SpatialType types[] = {SpatialType::Contains, SpatialType::Intersects, SpatialType::Within, SpatialType::Buffer};
    auto named_at = [&](std::size_t pos) {
        return config.named && (config.tier == 2 || pos + 1 == config.n_entities);
    };

    std::vector<EvalCase> out;
    std::set<std::string> seen;
    const std::size_t max_attempts = std::max<std::size_t>(200, config.count * 200);
    for (std::size_t attempt = 0; out.size() < config.count; ++attempt) {
        if (attempt >= max_attempts) {
            throw Error(ErrorCode::InsufficientData, "found only " + std::to_string(out.size()) + " of " +
                                                         std::to_string(config.count) + " valid cases");
        }
        const std::size_t last = config.n_entities - 1;
        const auto& pool_last = named_at(last) ? named_rows : rows;
        std::vector<Row> chain{pool_last[rng() % pool_last.size()]};
        std::vector<SpatialOpSpec> specs;
        bool ok = true;
        for (std::size_t pos = last; pos-- > 0;) {
            const Row& obj = chain.front();
            const auto& pool = named_at(pos) ? named_rows : rows;
            std::vector<SpatialType> order(std::begin(types), std::end(types));
            std::shuffle(order.begin(), order.end(), rng);
            bool found = false;
            for (SpatialType st : order) {
                SpatialOpSpec spec{st, std::nullopt, false};
                if (st == SpatialType::Buffer) {
                    spec.num = buffers[rng() % 3];
                }
                std::vector<const Row*> cands;
                for (const auto& g : pool) {
                    if (g.info->category == obj.info->category) {
                        continue;
                    }
                    bool used = false;
                    for (const auto& c : chain) {
                        used = used || (c.table == g.table && c.index == g.index);
                    }
                    if (used || !may_relate(g.entry->geometry.bbox(), obj.entry->geometry.bbox(), spec)) {
                        continue;
                    }
                    if (relate(g.entry->geometry, obj.entry->geometry, spec)) {
                        cands.push_back(&g);
                    }
                }
                if (!cands.empty()) {
                    chain.insert(chain.begin(), *cands[rng() % cands.size()]);
                    specs.insert(specs.begin(), spec);
                    found = true;
                    break;
                }
            }
            if (!found) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        EvalCase c;
        c.tier = config.tier;
        for (std::size_t i = 0; i < chain.size(); ++i) {
            EntitySpec e{chain[i].table->name, chain[i].info->category, std::nullopt};
            if (named_at(i)) {
                e.name = chain[i].info->name;
            }
            c.entities.push_back(e);
        }
        for (std::size_t i = 0; i < specs.size(); ++i) {
            c.relations.push_back({specs[i], i, i + 1});
        }
        c.truth_keys = oracle(snapshot, c);
        if (c.truth_keys.empty()) {
            continue;  // discard rule
        }
        c.nl_query = paraphrase(c, config.seed);
        if (!seen.insert(c.nl_query).second) {
            continue;
        }
        out.push_back(std::move(c));
    }
    return out;
}

agent::Transcript case_transcript(const std::vector<EvalCase>& cases) {
    agent::Transcript t;
    auto add = [&](agent::AgentRole role, const std::string& input, const std::string& response) {
        agent::TranscriptEntry e;
        e.role = role;
        e.input = input;
        e.input_digest = agent::input_digest(input);
        e.response = response;
        e.usage = usage_for(input, response);
        t.add(e);
    };
    for (const auto& c : cases) {
        add(agent::AgentRole::Router, c.nl_query,
            "The request needs new spatial calculations.\n```json\n{\"Receiver\": \"Analyzer\"}\n```");

        planner::RelationSpec spec;
        for (std::size_t i = 0; i < c.entities.size(); ++i) {
            spec.entities.push_back(entity_phrase(c.entities[i], i == 0));
        }
        for (const auto& r : c.relations) {
            spec.spatial_relations.push_back({filter_text(r.spec), r.subject, r.object});
        }
        add(agent::AgentRole::RelationAnalyzer, c.nl_query, "```json\n" + spec.to_json().dump(2) + "\n```");

        std::ostringstream code;
        code << "Each entity is fetched first, then the relations are applied from the last entity backwards.\n```python\n";
        for (std::size_t i = 0; i < c.entities.size(); ++i) {
            const auto& e = c.entities[i];
            const std::string what = e.name ? *e.name : e.category;
            code << "# Get the id_list of " << spec.entities[i] << "\n"
                 << "e" << i << " = id_list_of_entity(" << json(what).dump() << ")\n";
        }
        for (std::size_t k = c.relations.size(); k-- > 0;) {
            const auto& r = c.relations[k];
            const std::string object = k + 1 == c.relations.size() ? "e" + std::to_string(r.object)
                                                                    : "r" + std::to_string(k + 1) + "['subject']";
            code << "# Filter " << spec.entities[r.subject] << " " << filter_text(r.spec) << " "
                 << spec.entities[r.object] << "\n"
                 << "r" << k << " = geo_filter(" << json(filter_text(r.spec)).dump() << ", e" << r.subject << ", "
                 << object << ")\n";
        }
        code << "# Get the filtered " << spec.entities[0] << " id_list\nresult = r0['subject']\n```";
        add(agent::AgentRole::MissionPlanner, planner::planner_user_content(c.nl_query, spec, {}), code.str());

        for (const auto& r : c.relations) {
            const std::string phrase = filter_text(r.spec);
            if (analyzer::direct_relation(phrase)) {
                continue;
            }
            add(agent::AgentRole::ModifyAgent, phrase,
                "The phrase asks for a distance zone around the object.\n```json\n" +
                    analyzer::to_json(r.spec).dump() + "\n```");
        }
    }
    return t;
}

CaseScore score(const std::set<std::string>& retrieved, const std::set<std::string>& truth) {
    std::size_t hit = 0;
    for (const auto& k : retrieved) {
        hit += truth.count(k);
    }
    CaseScore s;
    if (retrieved.empty()) {
        s.precision = truth.empty() ? 1.0 : 0.0;
    } else {
        s.precision = static_cast<double>(hit) / static_cast<double>(retrieved.size());
    }
    s.recall = truth.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(truth.size());
    s.exact = retrieved == truth;
    return s;
}

json Metrics::to_json() const {
    return {{"cases", cases},         {"failures", failures},     {"precision", precision}, {"recall", recall},
            {"accuracy", accuracy},   {"tokens_in", tokens_in},   {"tokens_out", tokens_out}};
}

Metrics aggregate(const std::vector<CaseScore>& scores, const std::vector<RunOutcome>& outcomes) {
    Metrics m;
    m.cases = scores.size();
    if (m.cases == 0) {
        return m;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        m.precision += scores[i].precision;
        m.recall += scores[i].recall;
        m.accuracy += scores[i].exact ? 1.0 : 0.0;
        m.tokens_in += static_cast<double>(outcomes[i].usage.input_tokens);
        m.tokens_out += static_cast<double>(outcomes[i].usage.output_tokens);
        m.failures += outcomes[i].error.empty() ? 0 : 1;
    }
    const double n = static_cast<double>(m.cases);
    m.precision /= n;
    m.recall /= n;
    m.accuracy /= n;
    m.tokens_in /= n;
    m.tokens_out /= n;
    return m;
}

EvalReport evaluate(const std::vector<EvalCase>& cases, const CaseRunner& runner) {
    EvalReport report;
    std::map<int, std::vector<CaseScore>> tier_scores;
    std::map<int, std::vector<RunOutcome>> tier_outcomes;
    std::vector<CaseScore> all_scores;
    std::vector<RunOutcome> all_outcomes;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const EvalCase& c = cases[i];
        RunOutcome o;
        try {
            o = runner(c, i);
        } catch (const std::exception& e) {
            o = RunOutcome{};
            o.error = e.what();
        }
        if (!o.error.empty()) {
            o.keys.clear();
        }
        const CaseScore s = score(o.keys, c.truth_keys);
        tier_scores[c.tier].push_back(s);
        tier_outcomes[c.tier].push_back(o);
        all_scores.push_back(s);
        all_outcomes.push_back(o);
        json r = {{"index", i},          {"tier", c.tier},           {"nl_query", c.nl_query},
                  {"retrieved", o.keys.size()}, {"truth", c.truth_keys.size()}, {"precision", s.precision},
                  {"recall", s.recall},  {"exact", s.exact}};
        if (!o.error.empty()) {
            r["error"] = o.error;
        }
        report.case_results.push_back(r);
    }
    for (const auto& [tier, s] : tier_scores) {
        report.per_tier[tier] = aggregate(s, tier_outcomes[tier]);
    }
    report.overall = aggregate(all_scores, all_outcomes);
    return report;
}

json EvalReport::to_json() const {
    json tiers = json::object();
    for (const auto& [tier, m] : per_tier) {
        tiers[std::to_string(tier)] = m.to_json();
    }
    return {{"tiers", tiers}, {"overall", overall.to_json()}, {"cases", case_results}};
}

std::string EvalReport::table() const {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6s %6s %10s %8s %9s %10s %11s\n", "tier", "cases", "precision", "recall",
                  "accuracy", "tokens_in", "tokens_out");
    out << buf;
    auto row = [&](const std::string& label, const Metrics& m) {
        std::snprintf(buf, sizeof buf, "%-6s %6zu %10s %8s %9s %10.0f %11.0f\n", label.c_str(), m.cases,
                      pct(m.precision).c_str(), pct(m.recall).c_str(), pct(m.accuracy).c_str(), m.tokens_in,
                      m.tokens_out);
        out << buf;
    };
    for (const auto& [tier, m] : per_tier) {
        row(std::to_string(tier), m);
    }
    row("all", overall);
    return out.str();
}

}  // namespace geoqa::eval
