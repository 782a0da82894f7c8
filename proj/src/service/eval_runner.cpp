#include "geoqa/service/eval_runner.hpp"

#include "geoqa/error.hpp"
#include "geoqa/eval/city.hpp"
#include "geoqa/service/engine.hpp"

#include <fstream>

namespace geoqa::service {

using nlohmann::json;
namespace fs = std::filesystem;

EvalRunConfig EvalRunConfig::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read eval config " + file.string());
    }
    const fs::path base = fs::absolute(file).parent_path();
    EvalRunConfig c;
    try {
        const json j = json::parse(in);
        c.city_seed = j.value("city_seed", c.city_seed);
        c.seed = j.value("seed", c.seed);
        c.count = j.value("count", c.count);
        c.tiers = j.value("tiers", c.tiers);
        c.agents = j.value("agents", c.agents);
        c.paraphrase = j.value("paraphrase", c.paraphrase);
        if (j.contains("report")) {
            c.report_out = base / j["report"].get<std::string>();
        }
        if (j.contains("service")) {
            const auto& s = j["service"];
            if (s.is_string()) {
                c.service = ServiceConfig::load(base / s.get<std::string>());
            } else {
                c.service = ServiceConfig::from_json(s, base);
                c.service->apply_env();
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, "eval config " + file.string() + ": " + e.what());
    }
    if (c.agents != "ideal" && c.agents != "service") {
        throw Error(ErrorCode::InvalidArgument, "eval config: agents must be ideal or service");
    }
    if (c.paraphrase != "template" && c.paraphrase != "live") {
        throw Error(ErrorCode::InvalidArgument, "eval config: paraphrase must be template or live");
    }
    if (c.agents == "service" && !c.service) {
        throw Error(ErrorCode::InvalidArgument, "eval config: agents = service needs a service config");
    }
    if (c.paraphrase == "live" && c.agents != "service") {
        throw Error(ErrorCode::InvalidArgument, "eval config: live paraphrase needs service agents");
    }
    return c;
}

EvalRun run_eval(const EvalRunConfig& config) {
    auto st = std::make_shared<store::KnowledgeStore>(std::make_shared<store::TrigramEmbedder>());
    EngineParts parts;
    if (config.agents == "service") {
        ServiceConfig sc = *config.service;
        sc.store_dir.clear();
        sc.datasets.clear();
        sc.city_seed = config.city_seed;
        parts = build_parts(sc);
    } else {
        parts.store = st;
        eval::ingest_city(*st, eval::generate_city(config.city_seed));
        // ideal plans never set a bounding box
        parts.geocoder = std::make_shared<region::FixtureGeocoder>(nlohmann::json{{"places", json::object()}});
        parts.gateway_options = {0, std::chrono::milliseconds(0)};
    }

    EvalRun run;
    const auto snap = parts.store->snapshot();
    for (int tier : config.tiers) {
        auto cs = eval::generate_cases(*snap, eval::tier_config(tier, config.count, config.seed));
        run.cases.insert(run.cases.end(), cs.begin(), cs.end());
    }
    if (config.paraphrase == "live") {
        for (auto& c : run.cases) {
            c.nl_query = eval::paraphrase_live(*parts.backend, c);
        }
    }
    if (config.agents == "ideal") {
        parts.backend = std::make_shared<agent::ScriptedBackend>(eval::case_transcript(run.cases));
    }

    Engine engine(std::move(parts));
    run.report = eval::evaluate(run.cases, [&](const eval::EvalCase& c, std::size_t i) {
        const auto out = engine.query("eval-" + std::to_string(i + 1), c.nl_query);
        eval::RunOutcome o;
        o.keys = out.result_keys;
        o.usage = {out.body["usage"]["input_tokens"].get<std::int64_t>(),
                   out.body["usage"]["output_tokens"].get<std::int64_t>()};
        if (out.body["kind"] == "error") {
            o.error = out.body.value("message", "error");
        }
        return o;
    });
    engine.flush_recording();
    if (!config.report_out.empty()) {
        std::ofstream f(config.report_out);
        if (!f) {
            throw Error(ErrorCode::Io, "cannot write " + config.report_out.string());
        }
        f << run.report.to_json().dump(2) << "\n";
    }
    return run;
}

}  // namespace geoqa::service
