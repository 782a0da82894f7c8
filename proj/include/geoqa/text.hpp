#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geoqa::text {

/// ASCII lowercase; bytes >= 0x80 (UTF-8 sequences) pass through untouched.
std::string to_lower(std::string_view s);

/// Trims and collapses every run of whitespace to one space.
std::string collapse_whitespace(std::string_view s);

/// Lowercased whitespace tokens with surrounding punctuation stripped.
std::vector<std::string> tokenize(std::string_view s);

/// Rule-based English singularization of one word. Case is preserved.
/// ies -> y; ses/xes/zes/ches/shes -> drop "es"; trailing s -> drop.
/// Words on the irregulars list, and words ending in ss/us/is, are kept.
std::string singularize(std::string_view word);

/// True if `word` is guarded by the irregulars list.
bool is_irregular(std::string_view word);

/// Canonical matching form: lowercased tokens, each singularized, joined by
/// single spaces.
std::string normalize_term(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Lowercase hex SHA-256 of the bytes of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace geoqa::text
