#pragma once

#include "geoqa/agent/gateway.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoqa::agent {

/// SHA-256 hex of the whitespace-collapsed user content.
std::string input_digest(std::string_view user_content);

struct TranscriptEntry {
    AgentRole role = AgentRole::Router;
    std::string input_digest;
    std::string input;  // optional, kept for readability of fixture files
    std::string response;
    TokenUsage usage;
};

/// Canned responses keyed by (role, input digest).
class Transcript {
public:
    /// Throws Error(InvalidArgument) if the key exists with a different response.
    void add(TranscriptEntry entry);

    const TranscriptEntry* find(AgentRole role, const std::string& digest) const;

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }

    /// Accepts a JSON array of {role, input_digest | input, response, usage}.
    /// When both input and input_digest are given they must agree.
    static Transcript from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// One file, or every *.json file of a directory in filename order.
    static Transcript load(const std::filesystem::path& path);
    void save(const std::filesystem::path& file) const;

private:
    std::vector<TranscriptEntry> entries_;
    std::map<std::pair<AgentRole, std::string>, std::size_t> index_;
};

/// Offline backend answering from a Transcript. Unknown inputs raise
/// Error(TranscriptMiss); when a miss log is set, each miss is also appended
/// to it as one JSON line {role, input_digest, input}.
class ScriptedBackend : public CompletionBackend {
public:
    explicit ScriptedBackend(Transcript transcript, std::filesystem::path miss_log = {});

    CompletionResponse complete(const CompletionRequest& req, const std::string& system_prompt) override;

    const Transcript& transcript() const noexcept { return transcript_; }

    /// Entries served so far, in call order.
    std::vector<TranscriptEntry> served() const;

private:
    Transcript transcript_;
    std::filesystem::path miss_log_;
    mutable std::mutex mutex_;
    std::vector<TranscriptEntry> served_;
};

struct LiveBackendConfig {
    std::string base_url;
    std::string api_key;
    std::string model;
    double timeout_s = 60.0;
};

/// Chat-completion endpoint: POST {base}/chat/completions.
class LiveBackend : public CompletionBackend {
public:
    explicit LiveBackend(LiveBackendConfig config);

    CompletionResponse complete(const CompletionRequest& req, const std::string& system_prompt) override;

private:
    LiveBackendConfig config_;
};

/// Forwards to another backend and keeps every answer as a transcript entry.
class RecordingBackend : public CompletionBackend {
public:
    explicit RecordingBackend(std::shared_ptr<CompletionBackend> inner);

    CompletionResponse complete(const CompletionRequest& req, const std::string& system_prompt) override;

    Transcript recorded() const;

private:
    std::shared_ptr<CompletionBackend> inner_;
    mutable std::mutex mutex_;
    Transcript recorded_;
};

}  // namespace geoqa::agent
