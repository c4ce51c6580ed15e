#pragma once

#include "minstrel/doc/document.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace minstrel::doc {

enum class Severity { Error, Warning, Info };

std::string_view severity_name(Severity s) noexcept;

struct LintFinding {
    Severity severity;
    std::string rule_id;
    int line = 0;
    std::string message;

    bool operator==(const LintFinding&) const = default;
};

struct LintReport {
    /// Sorted by (line, rule_id).
    std::vector<LintFinding> findings;

    bool has_errors() const noexcept;
    std::size_t count(Severity s) const noexcept;
};

/// Rules:
///   E001 missing Goals            E002 empty block
///   W001 Constraints absent       W002 Initialization not last
///   W003 subsection under a kind that does not take them
///   I001 Profile (or its version field) missing
LintReport lint(const PromptDocument& doc);

/// Version string from the Profile block ("version: 1.2.0" or
/// "The version is 1.2.0."), if any.
std::optional<std::string> profile_version(const PromptDocument& doc);

}  // namespace minstrel::doc
