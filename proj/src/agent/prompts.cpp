#include "geoqa/agent/prompts.hpp"

#include "geoqa/error.hpp"
#include "templates.inc"

namespace geoqa::agent {

namespace {

// Calls visit(literal_text) and visit_slot(name) alternately over a template.
template <class Text, class Slot>
void walk(std::string_view tpl, Text&& text, Slot&& slot) {
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        const auto open = tpl.find("{{", pos);
        const auto close = open == std::string_view::npos ? open : tpl.find("}}", open + 2);
        if (close == std::string_view::npos) {
            text(tpl.substr(pos));
            return;
        }
        text(tpl.substr(pos, open - pos));
        slot(tpl.substr(open + 2, close - open - 2));
        pos = close + 2;
    }
}

}  // namespace

std::string_view prompt_template(AgentRole role) {
    switch (role) {
        case AgentRole::Router: return templates::kRouter;
        case AgentRole::RelationAnalyzer: return templates::kRelationAnalyzer;
        case AgentRole::MissionPlanner: return templates::kMissionPlanner;
        case AgentRole::BboxModifier: return templates::kBboxModifier;
        case AgentRole::IntentMatcher: return templates::kIntentMatcher;
        case AgentRole::QualityChecker: return templates::kQualityChecker;
        case AgentRole::ImitationRewriter: return templates::kImitationRewriter;
        case AgentRole::ModifyAgent: return templates::kModifyAgent;
        case AgentRole::Explainer: return templates::kExplainer;
    }
    return {};
}

std::string_view default_tool_catalog() { return templates::kToolCatalog; }

std::vector<std::string> template_slots(AgentRole role) {
    std::vector<std::string> names;
    walk(prompt_template(role), [](std::string_view) {}, [&](std::string_view name) { names.emplace_back(name); });
    return names;
}

std::string render_prompt(AgentRole role, const Slots& slots) {
    std::string out;
    walk(
        prompt_template(role), [&](std::string_view t) { out += t; },
        [&](std::string_view name) {
            auto it = slots.find(name);
            if (it == slots.end()) {
                throw Error(ErrorCode::MissingSlot, "template for " + std::string(to_string(role)) +
                                                        " needs slot '" + std::string(name) + "'");
            }
            out += it->second;
        });
    return out;
}

}  // namespace geoqa::agent
