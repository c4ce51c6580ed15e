#pragma once

#include "minstrel/error.hpp"

#include <nlohmann/json.hpp>

#include <span>
#include <string>
#include <string_view>

namespace minstrel::service {

/// The error body of every non-2xx response: {"error": {"code", "message"}}.
struct ApiError {
    std::string code;
    std::string message;
    int http_status = 500;
};

/// 400 validation and parse errors, 404 unknown session or prompt, 409
/// state-machine guards and version conflicts, 502 gateway and agent
/// failures, 500 I/O.
int http_status_for(ErrorCode code) noexcept;
ApiError to_api_error(const Error& e);
nlohmann::json to_json(const ApiError& e);

/// One API operation and the CLI subcommand that performs the same action.
struct ApiCommand {
    std::string_view method;
    /// Path template; "{id}" is one path segment.
    std::string_view path;
    std::string_view cli_command;
    bool mutation;
};

/// Every route the service exposes, apart from the static /ui mount.
std::span<const ApiCommand> api_commands() noexcept;

}  // namespace minstrel::service

namespace minstrel::doc {
struct LintReport;
}

namespace minstrel::service {

/// {"errors", "warnings", "infos", "findings": [{"rule", "severity", "line", "message"}]}
nlohmann::json to_json(const doc::LintReport& report);

}  // namespace minstrel::service
