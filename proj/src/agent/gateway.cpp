#include "geoqa/agent/gateway.hpp"

#include "geoqa/agent/json_extract.hpp"
#include "geoqa/error.hpp"

#include <exception>
#include <thread>

namespace geoqa::agent {

nlohmann::json to_json(const TokenUsage& usage) {
    return {{"input_tokens", usage.input_tokens}, {"output_tokens", usage.output_tokens}};
}

AgentGateway::AgentGateway(std::shared_ptr<CompletionBackend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {}

void AgentGateway::open_session(const std::string& session) {
    std::lock_guard lock(mutex_);
    usage_.try_emplace(session);
}

CompletionResponse AgentGateway::complete(const std::string& session, const CompletionRequest& req) {
    const std::string system_prompt = render_prompt(req.role, req.system_slots);
    auto delay = options_.backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            CompletionResponse resp = backend_->complete(req, system_prompt);
            std::lock_guard lock(mutex_);
            usage_[session] += resp.usage;
            ++calls_;
            return resp;
        } catch (const Error& e) {
            const bool transient = e.code() == ErrorCode::BackendUnavailable || e.code() == ErrorCode::RateLimited;
            if (!transient || attempt >= options_.max_retries) {
                throw;
            }
        }
        std::this_thread::sleep_for(delay);
        delay *= 2;
    }
}

nlohmann::json AgentGateway::complete_json(const std::string& session, const CompletionRequest& req, std::string* raw) {
    CompletionResponse first = complete(session, req);
    try {
        auto value = extract_json(first.text);
        if (raw) {
            *raw = first.text;
        }
        return value;
    } catch (const Error& original) {
        if (original.code() != ErrorCode::NoJsonFound && original.code() != ErrorCode::JsonSyntax) {
            throw;
        }
        const auto first_error = std::current_exception();
        CompletionRequest again = req;
        again.context.push_back({"user", req.user_content});
        again.context.push_back({"assistant", first.text});
        again.user_content = req.user_content + std::string(kReaskNote);
        CompletionResponse second = complete(session, again);
        try {
            auto value = extract_json(second.text);
            if (raw) {
                *raw = second.text;
            }
            return value;
        } catch (const Error&) {
            std::rethrow_exception(first_error);
        }
    }
}

TokenUsage AgentGateway::usage_report(const std::string& session) const {
    std::lock_guard lock(mutex_);
    auto it = usage_.find(session);
    if (it == usage_.end()) {
        throw Error(ErrorCode::UnknownSession, "no session '" + session + "'");
    }
    return it->second;
}

std::size_t AgentGateway::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

}  // namespace geoqa::agent
