#include "minstrel/doc/module_kind.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <array>
#include <utility>

namespace minstrel::doc {

namespace {

constexpr std::array kNamed = {
    NamedModule::Role,        NamedModule::Profile,      NamedModule::Background,
    NamedModule::Goals,       NamedModule::Constraints,  NamedModule::Skills,
    NamedModule::Style,       NamedModule::OutputFormat, NamedModule::Workflow,
    NamedModule::Examples,    NamedModule::Suggestion,   NamedModule::Command,
    NamedModule::Initialization,
};

constexpr int kCustomRank = 12;

constexpr std::pair<std::string_view, NamedModule> kAliases[] = {
    {"role", NamedModule::Role},
    {"profile", NamedModule::Profile},
    {"profiles", NamedModule::Profile},
    {"background", NamedModule::Background},
    {"backgrounds", NamedModule::Background},
    {"goal", NamedModule::Goals},
    {"goals", NamedModule::Goals},
    {"constraint", NamedModule::Constraints},
    {"constraints", NamedModule::Constraints},
    {"attention", NamedModule::Constraints},
    {"attentions", NamedModule::Constraints},
    {"skill", NamedModule::Skills},
    {"skills", NamedModule::Skills},
    {"style", NamedModule::Style},
    {"styles", NamedModule::Style},
    {"outputformat", NamedModule::OutputFormat},
    {"outputformats", NamedModule::OutputFormat},
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

std::string alias_key(std::string_view name) {
    std::string key;
    for (char c : text::trim(name)) {
        if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
        key.push_back(c);
    }
    return text::lower(key);
}

}  // namespace

std::span<const NamedModule> all_named_modules() noexcept { return kNamed; }

std::string_view module_name(NamedModule m) noexcept {
    switch (m) {
        case NamedModule::Role: return "Role";
        case NamedModule::Profile: return "Profile";
        case NamedModule::Background: return "Background";
        case NamedModule::Goals: return "Goals";
        case NamedModule::Constraints: return "Constraints";
        case NamedModule::Skills: return "Skills";
        case NamedModule::Style: return "Style";
        case NamedModule::OutputFormat: return "OutputFormat";
        case NamedModule::Workflow: return "Workflow";
        case NamedModule::Examples: return "Examples";
        case NamedModule::Suggestion: return "Suggestion";
        case NamedModule::Command: return "Command";
        case NamedModule::Initialization: return "Initialization";
    }
    return "";
}

ModuleKind ModuleKind::custom(std::string name) {
    auto trimmed = std::string(text::trim(name));
    if (trimmed.empty()) {
        throw Error(ErrorCode::InvalidElement, "custom module name is empty");
    }
    if (trimmed.find_first_of(":#\n") != std::string::npos) {
        throw Error(ErrorCode::InvalidElement, "custom module name '" + trimmed + "' contains ':', '#' or a newline");
    }
    if (lookup_named_module(trimmed)) {
        throw Error(ErrorCode::InvalidElement, "custom module name '" + trimmed + "' collides with a named module");
    }
    ModuleKind k;
    k.custom_ = std::move(trimmed);
    return k;
}

std::string ModuleKind::name() const {
    return is_custom() ? custom_ : std::string(module_name(named_));
}

int ModuleKind::rank() const noexcept {
    if (is_custom()) return kCustomRank;
    if (named_ == NamedModule::Initialization) return kCustomRank + 1;
    return static_cast<int>(named_);
}

bool ModuleKind::operator==(const ModuleKind& other) const noexcept {
    if (is_custom() != other.is_custom()) return false;
    return is_custom() ? text::iequals(custom_, other.custom_) : named_ == other.named_;
}

std::strong_ordering ModuleKind::operator<=>(const ModuleKind& other) const noexcept {
    if (auto c = rank() <=> other.rank(); c != 0) return c;
    if (!is_custom()) return std::strong_ordering::equal;
    return text::lower(custom_) <=> text::lower(other.custom_);
}

std::optional<NamedModule> lookup_named_module(std::string_view name) {
    auto key = alias_key(name);
    for (const auto& [alias, kind] : kAliases) {
        if (alias == key) return kind;
    }
    return std::nullopt;
}

ModuleKind module_from_heading(std::string_view name) {
    if (auto named = lookup_named_module(name)) return *named;
    return ModuleKind::custom(std::string(name));
}

bool allows_subsections(const ModuleKind& kind) noexcept {
    if (kind.is_custom()) return false;
    switch (kind.named()) {
        case NamedModule::Workflow:
        case NamedModule::Examples:
        case NamedModule::Suggestion:
        case NamedModule::Command:
            return true;
        default:
            return false;
    }
}

std::string_view module_purpose(NamedModule m) noexcept {
    switch (m) {
        case NamedModule::Role:
            return "Names the prompt and the persona the model takes on.";
        case NamedModule::Profile:
            return "Metadata for tracking the prompt: author, version, description, language.";
        case NamedModule::Background:
            return "Context and prior knowledge the model needs while working on the task.";
        case NamedModule::Goals:
            return "The end result the user wants the model to deliver.";
        case NamedModule::Constraints:
            return "Hard limits and requirements every response must respect.";
        case NamedModule::Skills:
            return "Abilities and knowledge areas relevant to the task.";
        case NamedModule::Style:
            return "Tone, register and affect of the responses.";
        case NamedModule::OutputFormat:
            return "Shape of the response so results are easy to extract.";
        case NamedModule::Workflow:
            return "Step-by-step procedure to follow while carrying out the task.";
        case NamedModule::Examples:
            return "Input/output pairs that illustrate the expected behaviour.";
        case NamedModule::Suggestion:
            return "Advice for branching situations: scenario and the response to take.";
        case NamedModule::Command:
            return "Commands the user can issue to switch between actions.";
        case NamedModule::Initialization:
            return "Opening instructions marking the start of the dialogue.";
    }
    return "";
}

}  // namespace minstrel::doc
