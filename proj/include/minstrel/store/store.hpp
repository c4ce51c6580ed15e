#pragma once

#include "minstrel/doc/document.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>

namespace minstrel::store {

inline constexpr std::string_view kDefaultVersion = "0.1.0";

/// Semver-like: dot-separated numbers with an optional "-prerelease" or "+build" tail.
bool valid_version(std::string_view v);
/// <0, 0, >0 like strcmp; numeric components compare numerically and a
/// prerelease sorts before its release.
int compare_versions(std::string_view a, std::string_view b);

struct StoredPrompt {
    std::string id;
    doc::PromptDocument document;
    std::string version;
    /// UTC, ISO 8601.
    std::string created_at;
    std::optional<std::string> parent_version;
};

struct ListEntry {
    std::string id;
    std::string latest_version;
    std::string role_name;

    bool operator==(const ListEntry&) const = default;
};

/// Directory of canonical prompt files plus index.json:
///   <root>/<id>/<version>.lgpt.md, <root>/index.json, <root>/sessions/<id>.json
/// Writes go through a temp file and rename; the index is renamed last, so
/// a prompt exists once the index names it. Writers take an exclusive
/// flock on <root>/.lock, which serializes saves across processes.
class PromptStore {
public:
    /// Creates the directory when missing and clears leftovers of interrupted saves.
    explicit PromptStore(std::filesystem::path root);

    /// Errors: LintErrors, VersionConflict, Validation (bad version or empty id), Io.
    StoredPrompt save(const doc::PromptDocument& document);
    /// Latest version when `version` is omitted. Errors: NotFound, Io.
    StoredPrompt get(const std::string& id, const std::optional<std::string>& version = std::nullopt) const;
    /// Sorted by id; `filter` is a case-insensitive substring of id or role name.
    std::vector<ListEntry> list(const std::optional<std::string>& filter = std::nullopt) const;
    /// Versions of one prompt, oldest first. Errors: NotFound.
    std::vector<std::string> versions(const std::string& id) const;

    /// Session exports, one file per session id (overwritten atomically).
    void put_session(const std::string& session_id, const nlohmann::json& record);
    nlohmann::json get_session(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Called at named points of a save ("prompt-written", "index-written");
    /// a throwing hook simulates a crash at that point.
    using FaultHook = std::function<void(std::string_view stage)>;
    void set_fault_hook(FaultHook hook) { fault_hook_ = std::move(hook); }

private:
    nlohmann::json read_index() const;
    void recover();

    std::filesystem::path root_;
    FaultHook fault_hook_;
    mutable std::mutex mu_;
};

}  // namespace minstrel::store
