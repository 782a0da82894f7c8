#pragma once

#include "geoqa/eval/harness.hpp"
#include "geoqa/service/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace geoqa::service {

/// `eval` settings. agents = "ideal" answers every agent call from
/// case_transcript(); agents = "service" uses the backend of the service
/// config (live or recorded transcripts) against the same synthetic city.
struct EvalRunConfig {
    std::uint64_t city_seed = 42;
    std::uint64_t seed = 7;
    std::size_t count = 10;
    std::vector<int> tiers = {1, 2, 3, 4};
    std::string agents = "ideal";        // ideal | service
    std::string paraphrase = "template";  // template | live (service agents only)
    std::optional<ServiceConfig> service;
    std::filesystem::path report_out;  // JSON report; "" = none

    static EvalRunConfig load(const std::filesystem::path& file);
};

struct EvalRun {
    std::vector<eval::EvalCase> cases;
    eval::EvalReport report;
};

/// Generates the tiers on the city, runs each query through a fresh Engine
/// session and scores the final answer keys.
EvalRun run_eval(const EvalRunConfig& config);

}  // namespace geoqa::service
