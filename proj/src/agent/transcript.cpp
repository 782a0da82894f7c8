#include "geoqa/agent/transcript.hpp"

#include "geoqa/error.hpp"
#include "geoqa/http_client.hpp"
#include "geoqa/text.hpp"

#include <algorithm>
#include <fstream>

namespace geoqa::agent {

namespace fs = std::filesystem;

std::string input_digest(std::string_view user_content) {
    return text::sha256_hex(text::collapse_whitespace(user_content));
}

void Transcript::add(TranscriptEntry entry) {
    auto key = std::make_pair(entry.role, entry.input_digest);
    if (auto it = index_.find(key); it != index_.end()) {
        if (entries_[it->second].response != entry.response) {
            throw Error(ErrorCode::InvalidArgument, "conflicting transcript entries for " +
                                                        std::string(to_string(entry.role)) + " " + entry.input_digest);
        }
        return;
    }
    index_.emplace(std::move(key), entries_.size());
    entries_.push_back(std::move(entry));
}

const TranscriptEntry* Transcript::find(AgentRole role, const std::string& digest) const {
    auto it = index_.find({role, digest});
    return it == index_.end() ? nullptr : &entries_[it->second];
}

Transcript Transcript::from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidArgument, "transcript must be a JSON array");
    }
    Transcript t;
    for (const auto& item : j) {
        TranscriptEntry e;
        e.role = parse_role(item.at("role").get<std::string>());
        e.input = item.value("input", "");
        e.response = item.at("response").get<std::string>();
        if (item.contains("input_digest")) {
            e.input_digest = item["input_digest"].get<std::string>();
            if (item.contains("input") && input_digest(e.input) != e.input_digest) {
                throw Error(ErrorCode::InvalidArgument, "transcript input_digest does not match input for " +
                                                            std::string(to_string(e.role)));
            }
        } else if (item.contains("input")) {
            e.input_digest = input_digest(e.input);
        } else {
            throw Error(ErrorCode::InvalidArgument, "transcript entry needs input or input_digest");
        }
        if (item.contains("usage")) {
            e.usage.input_tokens = item["usage"].value("input_tokens", 0);
            e.usage.output_tokens = item["usage"].value("output_tokens", 0);
        }
        if (e.usage.input_tokens < 0 || e.usage.output_tokens < 0) {
            throw Error(ErrorCode::InvalidArgument, "negative usage in transcript");
        }
        t.add(std::move(e));
    }
    return t;
}

nlohmann::json Transcript::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json item;
        item["role"] = to_string(e.role);
        item["input_digest"] = e.input_digest;
        if (!e.input.empty()) {
            item["input"] = e.input;
        }
        item["response"] = e.response;
        item["usage"] = {{"input_tokens", e.usage.input_tokens}, {"output_tokens", e.usage.output_tokens}};
        out.push_back(item);
    }
    return out;
}

Transcript Transcript::load(const fs::path& path) {
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(path);
    }
    Transcript all;
    for (const auto& f : files) {
        std::ifstream in(f);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot read transcript " + f.string());
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::Io, "transcript " + f.string() + ": " + e.what());
        }
        for (auto& e : from_json(j).entries_) {
            all.add(std::move(e));
        }
    }
    return all;
}

void Transcript::save(const fs::path& file) const {
    std::ofstream out(file);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write transcript " + file.string());
    }
    out << to_json().dump(2) << '\n';
}

ScriptedBackend::ScriptedBackend(Transcript transcript, fs::path miss_log)
    : transcript_(std::move(transcript)), miss_log_(std::move(miss_log)) {}

CompletionResponse ScriptedBackend::complete(const CompletionRequest& req, const std::string&) {
    const std::string digest = input_digest(req.user_content);
    const TranscriptEntry* e = transcript_.find(req.role, digest);
    if (!e) {
        if (!miss_log_.empty()) {
            std::lock_guard lock(mutex_);
            std::ofstream log(miss_log_, std::ios::app);
            log << nlohmann::json{{"role", to_string(req.role)}, {"input_digest", digest}, {"input", req.user_content}}.dump()
                << '\n';
        }
        throw Error(ErrorCode::TranscriptMiss,
                    "no scripted response for " + std::string(to_string(req.role)) + " input digest " + digest);
    }
    std::lock_guard lock(mutex_);
    served_.push_back(*e);
    return {e->response, e->usage};
}

std::vector<TranscriptEntry> ScriptedBackend::served() const {
    std::lock_guard lock(mutex_);
    return served_;
}

LiveBackend::LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {}

CompletionResponse LiveBackend::complete(const CompletionRequest& req, const std::string& system_prompt) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "system"}, {"content", system_prompt}});
    for (const auto& m : req.context) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    messages.push_back({{"role", "user"}, {"content", req.user_content}});
    const nlohmann::json body = {{"model", config_.model}, {"messages", messages}, {"temperature", req.temperature}};

    HttpClient client(config_.base_url, config_.timeout_s, {{"Authorization", "Bearer " + config_.api_key}});
    const HttpResponse res = client.post_json("/chat/completions", body.dump());
    if (res.status == 0) {
        throw Error(ErrorCode::BackendUnavailable, "chat endpoint unreachable: " + res.error);
    }
    if (res.status == 429) {
        throw Error(ErrorCode::RateLimited, "chat endpoint rate limited");
    }
    if (res.status != 200) {
        throw Error(ErrorCode::BackendUnavailable, "chat endpoint returned HTTP " + std::to_string(res.status));
    }
    try {
        const auto j = nlohmann::json::parse(res.body);
        CompletionResponse out;
        out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) {
            out.usage.input_tokens = j["usage"].value("prompt_tokens", 0);
            out.usage.output_tokens = j["usage"].value("completion_tokens", 0);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, std::string("unexpected chat response: ") + e.what());
    }
}

RecordingBackend::RecordingBackend(std::shared_ptr<CompletionBackend> inner) : inner_(std::move(inner)) {}

CompletionResponse RecordingBackend::complete(const CompletionRequest& req, const std::string& system_prompt) {
    CompletionResponse resp = inner_->complete(req, system_prompt);
    std::lock_guard lock(mutex_);
    const std::string digest = input_digest(req.user_content);
    // First answer wins if the same input is asked twice.
    if (!recorded_.find(req.role, digest)) {
        recorded_.add({req.role, digest, req.user_content, resp.text, resp.usage});
    }
    return resp;
}

Transcript RecordingBackend::recorded() const {
    std::lock_guard lock(mutex_);
    return recorded_;
}

}  // namespace geoqa::agent
