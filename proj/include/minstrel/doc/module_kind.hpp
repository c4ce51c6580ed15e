#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace minstrel::doc {

/// The thirteen named LangGPT modules, listed in canonical render order
/// (Initialization is placed after all custom modules when rendering).
enum class NamedModule {
    Role,
    Profile,
    Background,
    Goals,
    Constraints,
    Skills,
    Style,
    OutputFormat,
    Workflow,
    Examples,
    Suggestion,
    Command,
    Initialization,
};

std::span<const NamedModule> all_named_modules() noexcept;
std::string_view module_name(NamedModule m) noexcept;

/// A module kind: one of the named modules, or a user-defined custom module.
/// Custom names compare case-insensitively and can never spell a named
/// module (or one of its aliases).
class ModuleKind {
public:
    ModuleKind(NamedModule named) noexcept : named_(named) {}  // NOLINT(implicit)

    /// Throws Error(InvalidElement) if the name is empty, contains ':' or '#',
    /// or normalizes to a named module.
    static ModuleKind custom(std::string name);

    bool is_custom() const noexcept { return !custom_.empty(); }
    /// Meaningless for custom kinds.
    NamedModule named() const noexcept { return named_; }
    const std::string& custom_name() const noexcept { return custom_; }

    /// Heading spelling: canonical name for named kinds, the custom name as written.
    std::string name() const;
    /// Position in the canonical module order. All custom kinds share one rank.
    int rank() const noexcept;

    bool operator==(const ModuleKind& other) const noexcept;
    /// Orders by canonical rank, then custom names case-insensitively.
    std::strong_ordering operator<=>(const ModuleKind& other) const noexcept;

private:
    ModuleKind() = default;
    NamedModule named_ = NamedModule::Role;
    std::string custom_;
};

/// Resolves a module name or alias ("Goal", "Attention", "Output format", ...)
/// to a named module. Matching ignores case, spaces, '_' and '-'.
std::optional<NamedModule> lookup_named_module(std::string_view name);

/// Named module when the heading text matches one (or an alias), custom otherwise.
ModuleKind module_from_heading(std::string_view name);

/// Kinds whose blocks may carry `###` subsections without a lint warning.
bool allows_subsections(const ModuleKind& kind) noexcept;

/// One-line statement of what the module is for; used by the designer agents.
std::string_view module_purpose(NamedModule m) noexcept;

}  // namespace minstrel::doc
