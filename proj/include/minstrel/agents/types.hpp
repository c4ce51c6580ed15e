#pragma once

#include "minstrel/doc/document.hpp"
#include "minstrel/gateway/chat.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace minstrel::agents {

using doc::NamedModule;

enum class Stance { Critical, Favorable, Neutral, User };

std::string_view stance_name(Stance s) noexcept;
/// Throws Error(SchemaViolation) for unknown names.
Stance parse_stance(std::string_view s);

enum class AgentRole { Analyzer, Reflector, Designer, Simulator, Questioner, Commentator };

/// Which agent: the role plus the designer's target module or the
/// commentator's stance.
class AgentKind {
public:
    static AgentKind analyzer() { return AgentKind(AgentRole::Analyzer); }
    static AgentKind reflector() { return AgentKind(AgentRole::Reflector); }
    static AgentKind simulator() { return AgentKind(AgentRole::Simulator); }
    static AgentKind questioner() { return AgentKind(AgentRole::Questioner); }
    static AgentKind designer(NamedModule target);
    /// Throws Error(PreconditionViolation) for Stance::User.
    static AgentKind commentator(Stance stance);

    AgentRole role() const noexcept { return role_; }
    NamedModule target() const noexcept { return target_; }
    Stance stance() const noexcept { return stance_; }
    /// "analyzer", "designer:Constraints", "commentator:critical", ...
    std::string name() const;

    bool operator==(const AgentKind&) const = default;

private:
    explicit AgentKind(AgentRole r) : role_(r) {}
    AgentRole role_;
    NamedModule target_ = NamedModule::Role;
    Stance stance_ = Stance::Neutral;
};

/// Output schema ids, one per structured agent role.
namespace schema {
inline constexpr std::string_view kAnalyzer = "analyzer.v1";
inline constexpr std::string_view kDesigner = "designer.v1";
inline constexpr std::string_view kCommentator = "commentator.v1";
inline constexpr std::string_view kReflector = "reflector.v1";
inline constexpr std::string_view kText = "text";
}  // namespace schema

std::string_view schema_for(AgentRole role) noexcept;

struct AgentSpec {
    /// Unique within a registry: "analyzer", "designer-constraints", "critic-1", ...
    std::string id;
    AgentKind kind;
    /// The simulator has none: its system message is the prompt under test.
    std::optional<doc::PromptDocument> meta_prompt;
    std::string output_schema;
    std::optional<gateway::EndpointConfig> endpoint_override;
};

struct TaskBrief {
    std::string task_text;
    std::optional<std::string> domain_hint;
    std::string language = "English";

    bool operator==(const TaskBrief&) const = default;
};

/// Throws Error(Validation) when task_text is blank.
void validate(const TaskBrief& brief);

struct ActivationState {
    /// Canonical module order; always contains Role and Goals.
    std::set<NamedModule> activated;
    /// Keys are a subset of activated.
    std::map<NamedModule, std::string> rationale;

    bool operator==(const ActivationState&) const = default;
};

struct Issue {
    std::optional<NamedModule> module_hint;
    std::string text;

    bool operator==(const Issue&) const = default;
};

inline constexpr std::string_view kUserAuthor = "user";

struct Comment {
    /// Agent id, or "user".
    std::string author;
    Stance stance = Stance::User;
    /// 1..10; required for commentators.
    std::optional<int> score;
    std::vector<Issue> issues;

    bool operator==(const Comment&) const = default;
};

/// A user comment: one issue holding the text, with an optional module hint.
Comment user_comment(std::string text, std::optional<NamedModule> module_hint = std::nullopt);

struct ReflectionDirectives {
    /// Empty means converged.
    std::map<NamedModule, std::string> directives;

    bool converged() const noexcept { return directives.empty(); }
    std::set<NamedModule> keys() const;
    bool operator==(const ReflectionDirectives&) const = default;
};

/// Modules whose name or alias occurs as a word in the text, case-insensitively.
std::set<NamedModule> mentioned_modules(std::string_view text);

}  // namespace minstrel::agents
