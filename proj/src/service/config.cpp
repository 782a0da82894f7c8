#include "geoqa/service/config.hpp"

#include "geoqa/error.hpp"

#include <cstdlib>
#include <fstream>

namespace geoqa::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    if (p.empty()) {
        return {};
    }
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

template <class T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) {
        out = j[key].get<T>();
    }
}

void take_path(const json& j, const char* key, const fs::path& base, fs::path& out) {
    if (j.contains(key) && j[key].is_string()) {
        out = resolve(base, j[key].get<std::string>());
    }
}

void check_choice(const std::string& field, const std::string& value, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) {
            return;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "config: unknown " + field + " \"" + value + "\"");
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
    }
    ServiceConfig c;
    try {
        take(j, "host", c.host);
        take(j, "port", c.port);
        take(j, "mode", c.mode);
        take_path(j, "store_dir", base_dir, c.store_dir);
        if (j.contains("datasets")) {
            for (const auto& d : j.at("datasets")) {
                DatasetSource s;
                s.name = d.at("name").get<std::string>();
                s.file = resolve(base_dir, d.at("file").get<std::string>());
                take(d, "table", s.table);
                c.datasets.push_back(s);
            }
        }
        if (j.contains("city_seed") && !j["city_seed"].is_null()) {
            c.city_seed = j["city_seed"].get<std::uint64_t>();
        }
        take_path(j, "transcripts", base_dir, c.transcripts);
        take_path(j, "miss_log", base_dir, c.miss_log);
        take_path(j, "record_out", base_dir, c.record_out);
        if (j.contains("llm")) {
            const auto& l = j["llm"];
            take(l, "base_url", c.llm.base_url);
            take(l, "api_key", c.llm.api_key);
            take(l, "model", c.llm.model);
            take(l, "timeout_s", c.llm.timeout_s);
            take(l, "max_retries", c.max_retries);
            take(l, "backoff_ms", c.backoff_ms);
        }
        take(j, "explainer_max_iterations", c.explainer_max_iterations);
        if (j.contains("embedding")) {
            const auto& e = j["embedding"];
            take(e, "provider", c.embedding);
            take_path(e, "fixture", base_dir, c.embedding_fixture);
            take(e, "dimension", c.embedding_dim);
            take(e, "base_url", c.embedding_live.base_url);
            take(e, "api_key", c.embedding_live.api_key);
            take(e, "model", c.embedding_live.model);
            take(e, "timeout_s", c.embedding_live.timeout_s);
        }
        if (j.contains("geocoder")) {
            const auto& g = j["geocoder"];
            take(g, "provider", c.geocoder);
            take_path(g, "fixture", base_dir, c.geocoder_fixture);
            take(g, "base_url", c.nominatim.base_url);
            take(g, "timeout_s", c.nominatim.timeout_s);
            take(g, "user_agent", c.nominatim.user_agent);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("config: ") + e.what());
    }
    check_choice("mode", c.mode, {"scripted", "live", "record"});
    check_choice("embedding provider", c.embedding, {"trigram", "anchored", "live"});
    check_choice("geocoder provider", c.geocoder, {"fixture", "nominatim"});
    if (c.port < 0 || c.port > 65535) {
        throw Error(ErrorCode::InvalidArgument, "config: port out of range");
    }
    return c;
}

ServiceConfig ServiceConfig::load(const fs::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read config " + file.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, "config " + file.string() + ": " + e.what());
    }
    auto c = from_json(j, fs::absolute(file).parent_path());
    c.apply_env();
    return c;
}

void ServiceConfig::apply_env() {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (v == nullptr || *v == '\0') {
            return std::nullopt;
        }
        return std::string(v);
    };
    if (auto v = env("GEOQA_HOST")) {
        host = *v;
    }
    if (auto v = env("GEOQA_PORT")) {
        try {
            port = std::stoi(*v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "GEOQA_PORT is not a number");
        }
    }
    if (auto v = env("GEOQA_MODE")) {
        check_choice("mode", *v, {"scripted", "live", "record"});
        mode = *v;
    }
    if (auto v = env("GEOQA_STORE_DIR")) {
        store_dir = *v;
    }
    if (auto v = env("GEOQA_LLM_BASE_URL")) {
        llm.base_url = *v;
    }
    if (auto v = env("GEOQA_LLM_API_KEY")) {
        llm.api_key = *v;
        if (embedding_live.api_key.empty()) {
            embedding_live.api_key = *v;
        }
    }
    if (auto v = env("GEOQA_LLM_MODEL")) {
        llm.model = *v;
    }
}

}  // namespace geoqa::service
