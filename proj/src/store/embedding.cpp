#include "geoqa/store/embedding.hpp"

#include "geoqa/error.hpp"
#include "geoqa/http_client.hpp"
#include "geoqa/text.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

namespace geoqa::store {

namespace {

std::string lookup_form(std::string_view text) { return text::to_lower(text::collapse_whitespace(text)); }

void normalize(Vector& v) {
    double norm = 0.0;
    for (float x : v) {
        norm += static_cast<double>(x) * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
        return;
    }
    for (float& x : v) {
        x = static_cast<float>(x / norm);
    }
}

void require_text(std::string_view text) {
    if (text::collapse_whitespace(text).empty()) {
        throw Error(ErrorCode::EmptyText, "cannot embed empty text");
    }
}

}  // namespace

float cosine(const Vector& a, const Vector& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0F;
    }
    return static_cast<float>(dot / std::sqrt(na * nb));
}

Vector trigram_embedding(std::string_view text, std::size_t dim) {
    require_text(text);
    const std::string padded = " " + lookup_form(text) + " ";
    Vector v(dim, 0.0F);
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
        std::uint32_t h = 2166136261U;
        for (std::size_t k = i; k < i + 3; ++k) {
            h ^= static_cast<unsigned char>(padded[k]);
            h *= 16777619U;
        }
        v[h % dim] += 1.0F;
    }
    normalize(v);
    return v;
}

Vector TrigramEmbedder::embed(std::string_view text) { return trigram_embedding(text, dim_); }

AnchoredEmbedder::AnchoredEmbedder(const nlohmann::json& fixture, std::size_t dim) : dim_(dim) {
    for (const auto& [text, weights] : fixture.at("texts").items()) {
        auto& list = anchors_[lookup_form(text)];
        for (const auto& [anchor, w] : weights.items()) {
            list.emplace_back(anchor, w.get<double>());
        }
    }
}

AnchoredEmbedder AnchoredEmbedder::load(const std::filesystem::path& file, std::size_t dim) {
    std::ifstream in(file);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read embedding fixture " + file.string());
    }
    return AnchoredEmbedder(nlohmann::json::parse(in), dim);
}

Vector AnchoredEmbedder::embed(std::string_view text) {
    require_text(text);
    auto it = anchors_.find(lookup_form(text));
    if (it == anchors_.end()) {
        return trigram_embedding(text, dim_);
    }
    Vector v(dim_, 0.0F);
    for (const auto& [anchor, w] : it->second) {
        const Vector a = trigram_embedding(anchor, dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            v[i] += static_cast<float>(w * a[i]);
        }
    }
    normalize(v);
    return v;
}

LiveEmbedder::LiveEmbedder(LiveEmbedderConfig config, std::size_t dimension)
    : config_(std::move(config)), dim_(dimension) {}

Vector LiveEmbedder::embed(std::string_view text) {
    require_text(text);
    HttpClient client(config_.base_url, config_.timeout_s, {{"Authorization", "Bearer " + config_.api_key}});
    const nlohmann::json body = {{"model", config_.model}, {"input", std::string(text)}};
    const HttpResponse res = client.post_json("/embeddings", body.dump());
    if (res.status == 0) {
        throw Error(ErrorCode::BackendUnavailable, "embedding endpoint unreachable: " + res.error);
    }
    if (res.status == 429) {
        throw Error(ErrorCode::RateLimited, "embedding endpoint rate limited");
    }
    if (res.status != 200) {
        throw Error(ErrorCode::BackendUnavailable, "embedding endpoint returned HTTP " + std::to_string(res.status));
    }
    try {
        Vector v = nlohmann::json::parse(res.body).at("data").at(0).at("embedding").get<Vector>();
        if (v.size() != dim_) {
            throw Error(ErrorCode::BackendUnavailable, "embedding has dimension " + std::to_string(v.size()) +
                                                           ", expected " + std::to_string(dim_));
        }
        normalize(v);
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BackendUnavailable, std::string("unexpected embedding response: ") + e.what());
    }
}

}  // namespace geoqa::store
