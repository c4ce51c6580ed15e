#include "minstrel/doc/lint.hpp"

#include "minstrel/doc/text.hpp"

#include <algorithm>

namespace minstrel::doc {

std::string_view severity_name(Severity s) noexcept {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Info: return "info";
    }
    return "";
}

bool LintReport::has_errors() const noexcept { return count(Severity::Error) > 0; }

std::size_t LintReport::count(Severity s) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(findings.begin(), findings.end(), [s](const LintFinding& f) { return f.severity == s; }));
}

std::optional<std::string> profile_version(const PromptDocument& doc) {
    const auto* profile = doc.find(NamedModule::Profile);
    if (!profile) return std::nullopt;
    auto scan = [](const std::vector<Element>& elements) -> std::optional<std::string> {
        for (const auto& e : elements) {
            if (auto a = e.as<Assignment>(); a && text::iequals(a->property, "version")) return a->value;
            if (auto f = e.as<Freeform>(); f && text::istarts_with(f->text, "version")) {
                auto rest = text::trim(std::string_view(f->text).substr(7));
                if (!rest.empty() && rest.front() == ':') {
                    auto v = text::trim(rest.substr(1));
                    if (!v.empty()) return std::string(v);
                }
            }
        }
        return std::nullopt;
    };
    if (auto v = scan(profile->elements)) return v;
    for (const auto& sub : profile->subsections) {
        if (auto v = scan(sub.elements)) return v;
    }
    return std::nullopt;
}

LintReport lint(const PromptDocument& doc) {
    LintReport report;
    auto add = [&](Severity sev, std::string rule, int line, std::string msg) {
        report.findings.push_back(LintFinding{sev, std::move(rule), line, std::move(msg)});
    };
    const int role_line = doc.blocks().front().source_line;

    if (!doc.has(NamedModule::Goals)) add(Severity::Error, "E001", role_line, "missing Goals module");
    for (const auto& b : doc.blocks()) {
        if (b.kind == ModuleKind(NamedModule::Role)) continue;
        if (b.empty()) add(Severity::Error, "E002", b.source_line, "module '" + b.kind.name() + "' is empty");
    }
    if (!doc.has(NamedModule::Constraints)) {
        add(Severity::Warning, "W001", role_line, "no Constraints module: nothing the model must not do is stated");
    }
    const auto& blocks = doc.blocks();
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
        if (blocks[i].kind == ModuleKind(NamedModule::Initialization)) {
            add(Severity::Warning, "W002", blocks[i].source_line, "Initialization is not the last module");
        }
    }
    for (const auto& b : blocks) {
        if (allows_subsections(b.kind)) continue;
        for (const auto& sub : b.subsections) {
            add(Severity::Warning, "W003", sub.source_line,
                "subsection '" + sub.title + "' under module '" + b.kind.name() + "'");
        }
    }
    if (const auto* profile = doc.find(NamedModule::Profile); !profile) {
        add(Severity::Info, "I001", role_line, "no Profile module; version defaults to 0.1.0");
    } else if (!profile_version(doc)) {
        add(Severity::Info, "I001", profile->source_line, "Profile has no version field; version defaults to 0.1.0");
    }

    std::stable_sort(report.findings.begin(), report.findings.end(), [](const LintFinding& a, const LintFinding& b) {
        return std::tie(a.line, a.rule_id) < std::tie(b.line, b.rule_id);
    });
    return report;
}

}  // namespace minstrel::doc
