#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoqa::agent {

struct FencedBlock {
    std::string lang;  // word after the opening fence, lowercased; may be empty
    std::string body;
    std::size_t offset = 0;  // of body within the scanned text
};

/// Complete ``` ... ``` blocks in order of appearance.
std::vector<FencedBlock> fenced_blocks(std::string_view text);

/// Last block whose tag equals `lang` (any tag when empty).
std::optional<FencedBlock> last_block(std::string_view text, std::string_view lang = {});

/// Parses the last fenced block as JSON, or the whole text when there is no
/// fence. Tolerates trailing commas, single-quoted strings and Python
/// literals (True/False/None). Throws Error(NoJsonFound) when no object or
/// array is present and PositionedError(JsonSyntax) when parsing fails.
nlohmann::json extract_json(std::string_view text);

}  // namespace geoqa::agent
