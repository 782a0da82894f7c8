#include "geoqa/geometry/entity_key.hpp"

#include "geoqa/error.hpp"

namespace geoqa {

std::string EntityKey::serialize() const {
    std::string out = database + '_' + type_name + '_';
    if (!name.empty()) {
        out += name;
        out += '_';
    }
    out += id;
    return out;
}

EntityKey EntityKey::parse(std::string_view text) {
    const auto first = text.find('_');
    const auto second = first == std::string_view::npos ? first : text.find('_', first + 1);
    const auto last = text.rfind('_');
    if (second == std::string_view::npos || last < second) {
        throw Error(ErrorCode::KeyParseError, "expected at least 3 '_'-separated segments in '" + std::string(text) + "'");
    }
    EntityKey key;
    key.database = text.substr(0, first);
    key.type_name = text.substr(first + 1, second - first - 1);
    key.id = text.substr(last + 1);
    if (last > second) {
        key.name = text.substr(second + 1, last - second - 1);
    }
    return key;
}

}  // namespace geoqa
