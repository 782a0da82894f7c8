#include "geoqa/text.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <unordered_map>

namespace geoqa::text {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_strip_punct(char c) {
    switch (c) {
        case ',': case '.': case '?': case '!': case ';': case ':':
        case '"': case '\'': case '(': case ')': case '[': case ']':
        case '{': case '}':
            return true;
        default:
            return false;
    }
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Lowercase plural -> singular. Entries mapping to themselves are guards
// against the suffix rules.
const std::unordered_map<std::string, std::string>& irregulars() {
    static const std::unordered_map<std::string, std::string> table = {
        {"grass", "grass"},       {"glass", "glass"},     {"class", "class"},
        {"gas", "gas"},           {"bus", "bus"},         {"campus", "campus"},
        {"news", "news"},         {"series", "series"},   {"species", "species"},
        {"lens", "lens"},         {"moss", "moss"},       {"access", "access"},
        {"clothes", "clothes"},   {"christmas", "christmas"},
        {"people", "person"},     {"children", "child"},  {"men", "man"},
        {"women", "woman"},       {"feet", "foot"},       {"geese", "goose"},
        {"mice", "mouse"},        {"houses", "house"},    {"courses", "course"},
        {"warehouses", "warehouse"}, {"greenhouses", "greenhouse"},
        {"buses", "bus"},         {"gases", "gas"},       {"campuses", "campus"},
        {"statuses", "status"},   {"analyses", "analysis"},
        {"bases", "base"},        {"cases", "case"},      {"phases", "phase"},
        {"vases", "vase"},        {"leaves", "leaf"},     {"knives", "knife"},
        {"lives", "life"},        {"wolves", "wolf"},     {"shelves", "shelf"},
        {"movies", "movie"},      {"cookies", "cookie"},  {"pies", "pie"},
        {"ties", "tie"},          {"this", "this"},       {"its", "its"},
        {"has", "has"},           {"was", "was"},         {"does", "does"},
        {"is", "is"},             {"as", "as"},           {"us", "us"},
        {"yes", "yes"},           {"always", "always"},   {"towards", "towards"},
    };
    return table;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string lowered = to_lower(s);
    std::size_t i = 0;
    while (i < lowered.size()) {
        while (i < lowered.size() && is_space(lowered[i])) {
            ++i;
        }
        std::size_t start = i;
        while (i < lowered.size() && !is_space(lowered[i])) {
            ++i;
        }
        std::string_view tok(lowered.data() + start, i - start);
        while (!tok.empty() && is_strip_punct(tok.front())) {
            tok.remove_prefix(1);
        }
        while (!tok.empty() && is_strip_punct(tok.back())) {
            tok.remove_suffix(1);
        }
        if (!tok.empty()) {
            tokens.emplace_back(tok);
        }
    }
    return tokens;
}

bool is_irregular(std::string_view word) {
    return irregulars().count(to_lower(word)) > 0;
}

std::string singularize(std::string_view word) {
    const std::string lower = to_lower(word);
    if (auto it = irregulars().find(lower); it != irregulars().end()) {
        if (it->second == lower) {
            return std::string(word);
        }
        // Keep the original capitalisation of the first letter.
        std::string out = it->second;
        if (!word.empty() && word[0] >= 'A' && word[0] <= 'Z' && !out.empty()) {
            out[0] = static_cast<char>(out[0] - 'a' + 'A');
        }
        return out;
    }
    if (lower.size() <= 3) {
        return std::string(word);
    }
    if (ends_with(lower, "ies")) {
        return std::string(word.substr(0, word.size() - 3)) + (word.back() == 'S' ? "Y" : "y");
    }
    for (std::string_view suffix : {"sses", "xes", "zes", "ches", "shes"}) {
        if (ends_with(lower, suffix)) {
            return std::string(word.substr(0, word.size() - 2));
        }
    }
    if (ends_with(lower, "ses")) {
        return std::string(word.substr(0, word.size() - 2));
    }
    if (ends_with(lower, "ss") || ends_with(lower, "us") || ends_with(lower, "is")) {
        return std::string(word);
    }
    if (ends_with(lower, "s")) {
        return std::string(word.substr(0, word.size() - 1));
    }
    return std::string(word);
}

std::string normalize_term(std::string_view s) {
    std::vector<std::string> tokens = tokenize(s);
    for (auto& t : tokens) {
        t = singularize(t);
    }
    return join(tokens, " ");
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out.append(sep);
        }
        out.append(parts[i]);
    }
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) {
        throw std::runtime_error("to_chars failed");
    }
    return std::string(buf.data(), ptr);
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("EVP_Digest(sha256) failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0f]);
    }
    return out;
}

}  // namespace geoqa::text
