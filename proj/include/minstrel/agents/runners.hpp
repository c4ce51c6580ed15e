#pragma once

#include "minstrel/agents/types.hpp"
#include "minstrel/gateway/gateway.hpp"

#include <span>

namespace minstrel::agents {

/// Request tags: the first line of every structured agent request. Fixture
/// packs route scripted responses on these strings.
namespace tag {
std::string analyzer();
std::string designer(NamedModule target, bool revise);
std::string questioner(int turn);
std::string commentator(const std::string& agent_id, int round);
std::string reflector();
}  // namespace tag

/// Decides the activated modules for the task. Role and Goals are always added.
/// Errors: PreconditionViolation, SchemaViolation (after one repair turn),
/// UnknownModuleName.
ActivationState run_analyzer(const AgentSpec& spec, const TaskBrief& brief, gateway::Gateway& gw);

/// Writes (existing == nullptr) or revises one module block.
/// Errors: PreconditionViolation, SchemaViolation, UnknownModuleName, WrongModuleKind.
doc::ModuleBlock run_designer(const AgentSpec& spec, const TaskBrief& brief, const doc::ModuleBlock* existing,
                              const std::optional<std::string>& directive, gateway::Gateway& gw);

/// Questioner/simulator test dialogue; returns 2*turns messages, user first.
/// Errors: PreconditionViolation (turns < 1, or the prompt has lint errors);
/// gateway errors keep their code and gain the turn index in the message.
std::vector<gateway::ChatMessage> run_simulator_dialogue(const AgentSpec& simulator, const AgentSpec& questioner,
                                                         const doc::PromptDocument& prompt, const TaskBrief& brief,
                                                         int turns, gateway::Gateway& gw);

struct CommentatorRound {
    std::vector<Comment> first_round;
    /// After the debate round; these are the comments a test pass keeps.
    std::vector<Comment> final;
};

/// Five commentators judge the transcript, then each revises its comment
/// after reading all first-round comments. Stances come from the agent definitions.
/// Errors: StanceMultisetViolation (checked before any call), SchemaViolation.
CommentatorRound run_commentators(std::span<const AgentSpec> specs, const std::vector<gateway::ChatMessage>& transcript,
                                  const TaskBrief& brief, gateway::Gateway& gw, bool parallel = true);

/// Directives for the modules the comments point at; no call when comments is empty.
/// Errors: PreconditionViolation, SchemaViolation, UnknownModuleName.
ReflectionDirectives run_reflector(const AgentSpec& spec, const std::vector<Comment>& comments, gateway::Gateway& gw,
                                   const TaskBrief* brief = nullptr);

}  // namespace minstrel::agents
