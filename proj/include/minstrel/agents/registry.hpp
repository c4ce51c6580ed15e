#pragma once

#include "minstrel/agents/types.hpp"

#include <filesystem>
#include <map>
#include <vector>

namespace minstrel::agents {

/// The full Minstrel roster: analyzer, reflector, one designer per named
/// module, simulator, questioner and five commentators (two critical, two
/// favorable, one neutral). Meta-prompts are LangGPT documents; the
/// designer and commentator prompts are specialized per target and stance.
class AgentRegistry {
public:
    /// Meta-prompts compiled into the binary from agents/*.lgpt.md.
    static AgentRegistry builtin();
    /// Meta-prompts read from `dir` (analyzer, designer, questioner,
    /// commentator, reflector `.lgpt.md`); missing files fall back to builtin.
    static AgentRegistry from_directory(const std::filesystem::path& dir);
    /// Base meta-prompt texts keyed by file stem.
    static AgentRegistry from_texts(const std::map<std::string, std::string>& texts);

    const AgentSpec& analyzer() const { return analyzer_; }
    const AgentSpec& reflector() const { return reflector_; }
    const AgentSpec& simulator() const { return simulator_; }
    const AgentSpec& questioner() const { return questioner_; }
    const AgentSpec& designer(NamedModule target) const;
    const std::vector<AgentSpec>& commentators() const { return commentators_; }

    /// Applies an endpoint override to every agent whose id or role name
    /// (e.g. "commentator") equals `selector`.
    void set_endpoint_override(const std::string& selector, const gateway::EndpointConfig& config);

    std::vector<const AgentSpec*> all() const;

private:
    AgentRegistry(AgentSpec analyzer, AgentSpec reflector, AgentSpec simulator, AgentSpec questioner)
        : analyzer_(std::move(analyzer)), reflector_(std::move(reflector)), simulator_(std::move(simulator)),
          questioner_(std::move(questioner)) {}
    AgentSpec analyzer_;
    AgentSpec reflector_;
    AgentSpec simulator_;
    AgentSpec questioner_;
    std::map<NamedModule, AgentSpec> designers_;
    std::vector<AgentSpec> commentators_;
};

/// Embedded copies of agents/*.lgpt.md, keyed by stem.
const std::map<std::string, std::string>& builtin_agent_texts();

}  // namespace minstrel::agents
