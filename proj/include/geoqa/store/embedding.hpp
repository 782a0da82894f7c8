#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace geoqa::store {

using Vector = std::vector<float>;

float cosine(const Vector& a, const Vector& b);

/// Text -> unit-norm vector. Implementations must be thread-safe.
class Embedder {
public:
    virtual ~Embedder() = default;
    /// Throws Error(EmptyText) for blank input.
    virtual Vector embed(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
};

/// Lowercased, space-padded character trigrams hashed (FNV-1a) into `dim`
/// buckets, counted, then L2-normalized.
Vector trigram_embedding(std::string_view text, std::size_t dim = 256);

class TrigramEmbedder : public Embedder {
public:
    explicit TrigramEmbedder(std::size_t dim = 256) : dim_(dim) {}
    Vector embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
};

/// Deterministic stand-in for a semantic model: listed texts embed as the
/// normalized weighted sum of their anchors' trigram vectors, so a phrase can
/// be placed near words it shares no letters with. Other texts fall back to
/// plain trigram embedding.
///
/// Fixture format: {"texts": {"<text>": {"<anchor>": weight, ...}, ...}}.
/// Text lookup is case-insensitive and whitespace-collapsed.
class AnchoredEmbedder : public Embedder {
public:
    explicit AnchoredEmbedder(const nlohmann::json& fixture, std::size_t dim = 256);
    static AnchoredEmbedder load(const std::filesystem::path& file, std::size_t dim = 256);

    Vector embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

private:
    std::size_t dim_;
    std::map<std::string, std::vector<std::pair<std::string, double>>> anchors_;
};

struct LiveEmbedderConfig {
    std::string base_url;
    std::string api_key;
    std::string model;
    double timeout_s = 60.0;
};

/// Embedding endpoint: POST {base}/embeddings {model, input} ->
/// {data[0].embedding}. The result is re-normalized.
class LiveEmbedder : public Embedder {
public:
    LiveEmbedder(LiveEmbedderConfig config, std::size_t dimension);
    Vector embed(std::string_view text) override;
    std::size_t dimension() const override { return dim_; }

private:
    LiveEmbedderConfig config_;
    std::size_t dim_;
};

}  // namespace geoqa::store
