#include "geoqa/agent/role.hpp"

#include "geoqa/error.hpp"

#include <string>

namespace geoqa::agent {

std::string_view to_string(AgentRole role) {
    switch (role) {
        case AgentRole::Router: return "Router";
        case AgentRole::RelationAnalyzer: return "RelationAnalyzer";
        case AgentRole::MissionPlanner: return "MissionPlanner";
        case AgentRole::BboxModifier: return "BboxModifier";
        case AgentRole::IntentMatcher: return "IntentMatcher";
        case AgentRole::QualityChecker: return "QualityChecker";
        case AgentRole::ImitationRewriter: return "ImitationRewriter";
        case AgentRole::ModifyAgent: return "ModifyAgent";
        case AgentRole::Explainer: return "Explainer";
    }
    return "Unknown";
}

AgentRole parse_role(std::string_view name) {
    for (AgentRole r : kAllRoles) {
        if (to_string(r) == name) {
            return r;
        }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown agent role '" + std::string(name) + "'");
}

}  // namespace geoqa::agent
