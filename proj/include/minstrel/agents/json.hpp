#pragma once

#include "minstrel/agents/types.hpp"

#include <nlohmann/json.hpp>

namespace minstrel::agents {

nlohmann::json to_json(const TaskBrief& b);
TaskBrief brief_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ActivationState& a);
ActivationState activation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Comment& c);
Comment comment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReflectionDirectives& d);
ReflectionDirectives directives_from_json(const nlohmann::json& j);

/// Module name to NamedModule via the alias table; Error(UnknownModuleName) otherwise.
NamedModule module_from_name(std::string_view name);

/// Extracts the JSON body of an agent reply: the first ```json (or ```) fence,
/// or the whole reply when it is a bare object. nullopt when none parses.
std::optional<nlohmann::json> extract_json(std::string_view reply, std::string* why = nullptr);

}  // namespace minstrel::agents
