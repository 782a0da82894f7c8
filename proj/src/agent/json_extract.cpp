#include "geoqa/agent/json_extract.hpp"

#include "geoqa/error.hpp"
#include "geoqa/text.hpp"

#include <cctype>

namespace geoqa::agent {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Rewrites near-JSON into JSON: single-quoted strings become double-quoted,
// bare True/False/None become JSON literals, trailing commas are dropped.
std::string relax(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const char c = in[i];
        if (c == '"' || c == '\'') {
            const char quote = c;
            out += '"';
            ++i;
            while (i < in.size() && in[i] != quote) {
                if (in[i] == '\\' && i + 1 < in.size()) {
                    if (quote == '\'' && in[i + 1] == '\'') {
                        out += '\'';
                    } else {
                        out += in[i];
                        out += in[i + 1];
                    }
                    i += 2;
                    continue;
                }
                if (quote == '\'' && in[i] == '"') {
                    out += "\\\"";
                } else {
                    out += in[i];
                }
                ++i;
            }
            out += '"';
            ++i;
            continue;
        }
        if (c == ',') {
            std::size_t j = i + 1;
            while (j < in.size() && std::isspace(static_cast<unsigned char>(in[j]))) {
                ++j;
            }
            if (j < in.size() && (in[j] == '}' || in[j] == ']')) {
                ++i;
                continue;
            }
        }
        if (std::isalpha(static_cast<unsigned char>(c)) && (i == 0 || !is_word_char(in[i - 1]))) {
            std::size_t j = i;
            while (j < in.size() && is_word_char(in[j])) {
                ++j;
            }
            const std::string_view word = in.substr(i, j - i);
            if (word == "True") {
                out += "true";
            } else if (word == "False") {
                out += "false";
            } else if (word == "None") {
                out += "null";
            } else {
                out += word;
            }
            i = j;
            continue;
        }
        out += c;
        ++i;
    }
    return out;
}

nlohmann::json parse_candidate(std::string_view body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& strict) {
        try {
            return nlohmann::json::parse(relax(body));
        } catch (const nlohmann::json::parse_error&) {
            // Report the strict parser's position: it refers to the original text.
            const std::size_t at = strict.byte > 0 ? strict.byte - 1 : 0;
            throw PositionedError(ErrorCode::JsonSyntax, at, strict.what());
        }
    }
}

}  // namespace

std::vector<FencedBlock> fenced_blocks(std::string_view text) {
    std::vector<FencedBlock> blocks;
    std::size_t pos = 0;
    while (true) {
        const auto open = text.find("```", pos);
        if (open == std::string_view::npos) {
            break;
        }
        std::size_t tag_end = open + 3;
        while (tag_end < text.size() && is_word_char(text[tag_end])) {
            ++tag_end;
        }
        const auto close = text.find("```", tag_end);
        if (close == std::string_view::npos) {
            break;
        }
        FencedBlock block;
        block.lang = text::to_lower(text.substr(open + 3, tag_end - open - 3));
        block.body = std::string(text.substr(tag_end, close - tag_end));
        block.offset = tag_end;
        blocks.push_back(std::move(block));
        pos = close + 3;
    }
    return blocks;
}

std::optional<FencedBlock> last_block(std::string_view text, std::string_view lang) {
    auto blocks = fenced_blocks(text);
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        if (lang.empty() || it->lang == lang) {
            return *it;
        }
    }
    return std::nullopt;
}

nlohmann::json extract_json(std::string_view text) {
    if (auto block = last_block(text)) {
        if (block->body.find_first_of("{[") == std::string::npos) {
            throw Error(ErrorCode::NoJsonFound, "last fenced block holds no JSON object or array");
        }
        try {
            return parse_candidate(block->body);
        } catch (const PositionedError& e) {
            throw PositionedError(ErrorCode::JsonSyntax, block->offset + e.position(), e.reason());
        }
    }
    const auto first = text.find_first_of("{[");
    if (first == std::string_view::npos) {
        throw Error(ErrorCode::NoJsonFound, "response contains neither a fenced block nor a JSON value");
    }
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
    }
    // Prose around a bare value: parse from the first opening bracket to the
    // last closing one.
    const auto last = text.find_last_of("}]");
    if (last == std::string_view::npos || last < first) {
        throw PositionedError(ErrorCode::JsonSyntax, first, "unterminated JSON value");
    }
    try {
        return parse_candidate(text.substr(first, last - first + 1));
    } catch (const PositionedError& e) {
        throw PositionedError(ErrorCode::JsonSyntax, first + e.position(), e.reason());
    }
}

}  // namespace geoqa::agent
