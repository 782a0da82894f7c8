#pragma once

#include "geoqa/agent/transcript.hpp"
#include "geoqa/region/region_selector.hpp"
#include "geoqa/store/embedding.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace geoqa::service {

struct DatasetSource {
    std::string name;
    std::filesystem::path file;
    std::string table;  // "" = dataset name
};

/// Service settings. Relative paths in the file resolve against the file's
/// directory. Environment overrides: GEOQA_HOST, GEOQA_PORT, GEOQA_MODE,
/// GEOQA_STORE_DIR, GEOQA_LLM_BASE_URL, GEOQA_LLM_API_KEY, GEOQA_LLM_MODEL.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string mode = "scripted";  // scripted | live | record

    // Data. A saved snapshot in store_dir wins; otherwise datasets are
    // ingested, or the synthetic city when city_seed is set.
    std::filesystem::path store_dir;
    std::vector<DatasetSource> datasets;
    std::optional<std::uint64_t> city_seed;

    // Agents.
    std::filesystem::path transcripts;  // file or directory (scripted)
    std::filesystem::path miss_log;     // scripted misses, one JSON line each
    std::filesystem::path record_out;   // record mode output file
    agent::LiveBackendConfig llm;
    int max_retries = 3;
    int backoff_ms = 200;
    int explainer_max_iterations = 5;

    // Providers.
    std::string embedding = "trigram";  // trigram | anchored | live
    std::filesystem::path embedding_fixture;
    store::LiveEmbedderConfig embedding_live;
    std::size_t embedding_dim = 256;
    std::string geocoder = "fixture";  // fixture | nominatim
    std::filesystem::path geocoder_fixture;
    region::NominatimConfig nominatim;

    /// Throws Error(InvalidArgument) for unknown modes or providers and for
    /// fields of the wrong type.
    static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
    /// Reads the file and applies environment overrides. Throws Error(Io).
    static ServiceConfig load(const std::filesystem::path& file);

    void apply_env();
};

}  // namespace geoqa::service
