#pragma once

#include "geoqa/agent/role.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace geoqa::agent {

using Slots = std::map<std::string, std::string, std::less<>>;

/// Raw template text with {{slot}} placeholders.
std::string_view prompt_template(AgentRole role);

/// Placeholder names used by the role's template, in order of appearance.
std::vector<std::string> template_slots(AgentRole role);

/// Substitutes every {{slot}}. Throws Error(MissingSlot) naming the first
/// placeholder without a value. Extra slots are ignored.
std::string render_prompt(AgentRole role, const Slots& slots);

/// The planner's tool descriptions, the default value of the "tools" slot.
std::string_view default_tool_catalog();

}  // namespace geoqa::agent
