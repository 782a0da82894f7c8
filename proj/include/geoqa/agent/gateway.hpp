#pragma once

#include "geoqa/agent/prompts.hpp"
#include "geoqa/agent/role.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace geoqa::agent {

struct TokenUsage {
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& o) {
        input_tokens += o.input_tokens;
        output_tokens += o.output_tokens;
        return *this;
    }
    friend bool operator==(const TokenUsage&, const TokenUsage&) = default;
};

nlohmann::json to_json(const TokenUsage& usage);

struct Message {
    std::string role;  // "user" | "assistant"
    std::string content;
};

struct CompletionRequest {
    AgentRole role = AgentRole::Router;
    std::string user_content;
    std::vector<Message> context;
    double temperature = 0.0;
    Slots system_slots;
};

struct CompletionResponse {
    std::string text;
    TokenUsage usage;
};

/// A chat-completion provider. `system_prompt` is the rendered template.
class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual CompletionResponse complete(const CompletionRequest& req, const std::string& system_prompt) = 0;
};

struct GatewayOptions {
    int max_retries = 3;
    std::chrono::milliseconds backoff{200};
};

/// Renders prompts, calls the backend with retry, re-asks once for missing
/// JSON, and keeps per-session token totals. Thread-safe.
class AgentGateway {
public:
    AgentGateway(std::shared_ptr<CompletionBackend> backend, GatewayOptions options = {});

    /// Retries BackendUnavailable and RateLimited with exponential backoff.
    CompletionResponse complete(const std::string& session, const CompletionRequest& req);

    /// complete() followed by extract_json(). On NoJsonFound/JsonSyntax asks
    /// once more with a correction note; if that also fails the first error
    /// is rethrown. `raw` receives the text the value was taken from.
    nlohmann::json complete_json(const std::string& session, const CompletionRequest& req, std::string* raw = nullptr);

    void open_session(const std::string& session);

    /// Throws Error(UnknownSession) for a session never opened or used.
    TokenUsage usage_report(const std::string& session) const;

    /// Number of backend calls made so far (all sessions).
    std::size_t call_count() const;

private:
    std::shared_ptr<CompletionBackend> backend_;
    GatewayOptions options_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, TokenUsage> usage_;
    std::size_t calls_ = 0;
};

/// Note appended to the user content when re-asking for JSON.
inline constexpr std::string_view kReaskNote =
    "\n\nYour previous reply did not contain a parsable JSON block. Give your reasoning, then exactly one ```json block.";

}  // namespace geoqa::agent
