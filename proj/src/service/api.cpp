#include "minstrel/service/api.hpp"

#include "minstrel/doc/lint.hpp"

namespace minstrel::service {

namespace {

constexpr ApiCommand kCommands[] = {
    {"POST", "/sessions", "generate", true},
    {"GET", "/sessions", "show", false},
    {"GET", "/sessions/{id}", "show", false},
    {"POST", "/sessions/{id}/test", "test", true},
    {"POST", "/sessions/{id}/comments", "comment", true},
    {"POST", "/sessions/{id}/reflect", "reflect", true},
    {"POST", "/sessions/{id}/finalize", "finalize", true},
    {"GET", "/prompts", "list", false},
    {"POST", "/prompts", "save", true},
    {"GET", "/prompts/{id}", "get", false},
    {"POST", "/lint", "lint", false},
    {"POST", "/compare", "compare", true},
};

}  // namespace

int http_status_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotFound: return 404;
        case ErrorCode::InvalidState:
        case ErrorCode::SessionNotAwaitingInput:
        case ErrorCode::NotFinalized:
        case ErrorCode::PreconditionViolation:
        case ErrorCode::VersionConflict: return 409;
        case ErrorCode::Transport:
        case ErrorCode::Timeout:
        case ErrorCode::RetriesExhausted:
        case ErrorCode::EmptyCompletion:
        case ErrorCode::AmbiguousFixture:
        case ErrorCode::InvalidRequest:
        case ErrorCode::SchemaViolation:
        case ErrorCode::UnknownModuleName:
        case ErrorCode::WrongModuleKind:
        case ErrorCode::StanceMultisetViolation: return 502;
        case ErrorCode::Io: return 500;
        default: return 400;
    }
}

ApiError to_api_error(const Error& e) { return {std::string(e.code_name()), e.what(), http_status_for(e.code())}; }

nlohmann::json to_json(const ApiError& e) { return {{"error", {{"code", e.code}, {"message", e.message}}}}; }

std::span<const ApiCommand> api_commands() noexcept { return kCommands; }

nlohmann::json to_json(const doc::LintReport& report) {
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : report.findings) {
        findings.push_back(
            {{"rule", f.rule_id}, {"severity", doc::severity_name(f.severity)}, {"line", f.line}, {"message", f.message}});
    }
    return {{"errors", report.count(doc::Severity::Error)},
            {"warnings", report.count(doc::Severity::Warning)},
            {"infos", report.count(doc::Severity::Info)},
            {"findings", findings}};
}

}  // namespace minstrel::service
