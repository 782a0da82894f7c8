#pragma once

#include <array>
#include <string_view>

namespace geoqa::agent {

enum class AgentRole {
    Router,
    RelationAnalyzer,
    MissionPlanner,
    BboxModifier,
    IntentMatcher,
    QualityChecker,
    ImitationRewriter,
    ModifyAgent,
    Explainer,
};

inline constexpr std::array<AgentRole, 9> kAllRoles = {
    AgentRole::Router,        AgentRole::RelationAnalyzer,  AgentRole::MissionPlanner,
    AgentRole::BboxModifier,  AgentRole::IntentMatcher,     AgentRole::QualityChecker,
    AgentRole::ImitationRewriter, AgentRole::ModifyAgent,   AgentRole::Explainer,
};

std::string_view to_string(AgentRole role);

/// Inverse of to_string. Throws Error(InvalidArgument) for unknown names.
AgentRole parse_role(std::string_view name);

}  // namespace geoqa::agent
