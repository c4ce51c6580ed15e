#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace minstrel {

/// Closed set of failure codes shared by every module. The token spelling
/// (see code_name) is part of the CLI `--json` output and the HTTP API.
enum class ErrorCode {
    // document model
    MissingRole,
    DuplicateModule,
    MalformedHeading,
    EmptySlot,
    AmbiguousSlot,
    NoActions,
    InvalidElement,
    // gateway
    Transport,
    Timeout,
    RetriesExhausted,
    EmptyCompletion,
    AmbiguousFixture,
    InvalidConfig,
    InvalidRequest,
    // agents
    SchemaViolation,
    UnknownModuleName,
    WrongModuleKind,
    StanceMultisetViolation,
    PreconditionViolation,
    // orchestrator
    InvalidState,
    SessionNotAwaitingInput,
    NotFinalized,
    // store
    LintErrors,
    VersionConflict,
    NotFound,
    Io,
    // service
    Validation,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, int line = 0)
        : std::runtime_error(message), code_(code), line_(line) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const noexcept { return minstrel::code_name(code_); }
    /// 1-based source line for parse errors, 0 otherwise.
    int line() const noexcept { return line_; }

private:
    ErrorCode code_;
    int line_;
};

}  // namespace minstrel
