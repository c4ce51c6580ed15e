#include "minstrel/agents/types.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <cctype>

namespace minstrel::agents {

std::string_view stance_name(Stance s) noexcept {
    switch (s) {
        case Stance::Critical: return "critical";
        case Stance::Favorable: return "favorable";
        case Stance::Neutral: return "neutral";
        case Stance::User: return "user";
    }
    return "";
}

Stance parse_stance(std::string_view s) {
    for (auto st : {Stance::Critical, Stance::Favorable, Stance::Neutral, Stance::User}) {
        if (text::iequals(s, stance_name(st))) return st;
    }
    throw Error(ErrorCode::SchemaViolation, "unknown stance '" + std::string(s) + "'");
}

AgentKind AgentKind::designer(NamedModule target) {
    AgentKind k(AgentRole::Designer);
    k.target_ = target;
    return k;
}

AgentKind AgentKind::commentator(Stance stance) {
    if (stance == Stance::User) throw Error(ErrorCode::PreconditionViolation, "a commentator cannot have the user stance");
    AgentKind k(AgentRole::Commentator);
    k.stance_ = stance;
    return k;
}

std::string AgentKind::name() const {
    switch (role_) {
        case AgentRole::Analyzer: return "analyzer";
        case AgentRole::Reflector: return "reflector";
        case AgentRole::Simulator: return "simulator";
        case AgentRole::Questioner: return "questioner";
        case AgentRole::Designer: return "designer:" + std::string(doc::module_name(target_));
        case AgentRole::Commentator: return "commentator:" + std::string(stance_name(stance_));
    }
    return "";
}

std::string_view schema_for(AgentRole role) noexcept {
    switch (role) {
        case AgentRole::Analyzer: return schema::kAnalyzer;
        case AgentRole::Designer: return schema::kDesigner;
        case AgentRole::Commentator: return schema::kCommentator;
        case AgentRole::Reflector: return schema::kReflector;
        case AgentRole::Simulator:
        case AgentRole::Questioner: return schema::kText;
    }
    return schema::kText;
}

void validate(const TaskBrief& brief) {
    if (text::trim(brief.task_text).empty()) throw Error(ErrorCode::Validation, "task text is empty");
}

Comment user_comment(std::string text, std::optional<NamedModule> module_hint) {
    Comment c;
    c.author = std::string(kUserAuthor);
    c.stance = Stance::User;
    c.issues.push_back(Issue{module_hint, std::move(text)});
    return c;
}

std::set<NamedModule> ReflectionDirectives::keys() const {
    std::set<NamedModule> out;
    for (const auto& [k, _] : directives) out.insert(k);
    return out;
}

namespace {

struct Phrase {
    std::string_view text;
    NamedModule module;
};

constexpr Phrase kPhrases[] = {
    {"role", NamedModule::Role},
    {"profile", NamedModule::Profile},
    {"background", NamedModule::Background},
    {"goal", NamedModule::Goals},
    {"goals", NamedModule::Goals},
    {"constraint", NamedModule::Constraints},
    {"constraints", NamedModule::Constraints},
    {"attention", NamedModule::Constraints},
    {"skill", NamedModule::Skills},
    {"skills", NamedModule::Skills},
    {"style", NamedModule::Style},
    {"styles", NamedModule::Style},
    {"outputformat", NamedModule::OutputFormat},
    {"output format", NamedModule::OutputFormat},
    {"output_format", NamedModule::OutputFormat},
    {"workflow", NamedModule::Workflow},
    {"workflows", NamedModule::Workflow},
    {"example", NamedModule::Examples},
    {"examples", NamedModule::Examples},
    {"suggestion", NamedModule::Suggestion},
    {"suggestions", NamedModule::Suggestion},
    {"command", NamedModule::Command},
    {"commands", NamedModule::Command},
    {"initialization", NamedModule::Initialization},
    {"initialisation", NamedModule::Initialization},
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::set<NamedModule> mentioned_modules(std::string_view haystack) {
    std::set<NamedModule> out;
    for (const auto& p : kPhrases) {
        for (auto pos = text::ifind(haystack, p.text); pos != std::string_view::npos;
             pos = text::ifind(haystack, p.text, pos + 1)) {
            bool left = pos == 0 || !word_char(haystack[pos - 1]);
            auto end = pos + p.text.size();
            bool right = end == haystack.size() || !word_char(haystack[end]);
            if (left && right) {
                out.insert(p.module);
                break;
            }
        }
    }
    return out;
}

}  // namespace minstrel::agents
