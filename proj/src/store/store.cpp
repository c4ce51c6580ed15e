#include "minstrel/store/store.hpp"

#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <regex>
#include <sstream>

namespace minstrel::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kIndex = "index.json";
constexpr const char* kLock = ".lock";
constexpr const char* kSessions = "sessions";
constexpr std::string_view kPromptExt = ".lgpt.md";

[[noreturn]] void io_error(const std::string& what, const fs::path& p) {
    throw Error(ErrorCode::Io, what + " " + p.string() + ": " + std::strerror(errno));
}

/// flock on the store's lock file; exclusive for writers.
class FileLock {
public:
    FileLock(const fs::path& path, bool exclusive) {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) io_error("cannot open lock", path);
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            ::close(fd_);
            io_error("cannot lock", path);
        }
    }
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_;
};

void fsync_dir(const fs::path& dir) {
    int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

/// Writes `<path>.tmp`, syncs it, then renames it over `path`. `before_rename`
/// runs between the two steps.
void write_atomic(const fs::path& path, std::string_view content, const std::function<void()>& before_rename = {}) {
    fs::path tmp = path;
    tmp += ".tmp";
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_error("cannot create", tmp);
    std::size_t done = 0;
    while (done < content.size()) {
        auto n = ::write(fd, content.data() + done, content.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd);
            io_error("cannot write", tmp);
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) io_error("cannot sync", tmp);
    if (before_rename) before_rename();
    if (::rename(tmp.c_str(), path.c_str()) != 0) io_error("cannot rename", tmp);
    fsync_dir(path.parent_path());
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json empty_index() { return {{"format", "minstrel-store"}, {"version", 1}, {"prompts", json::object()}}; }

const json* find_version(const json& entry, std::string_view version) {
    for (const auto& v : entry.at("versions")) {
        if (v.at("version").get<std::string>() == version) return &v;
    }
    return nullptr;
}

std::string latest_of(const json& entry) {
    std::string best;
    for (const auto& v : entry.at("versions")) {
        auto s = v.at("version").get<std::string>();
        if (best.empty() || compare_versions(s, best) > 0) best = s;
    }
    return best;
}

void check_session_id(const std::string& id) {
    if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-_") != std::string::npos) {
        throw Error(ErrorCode::Validation, "invalid session id '" + id + "'");
    }
}

struct Parsed {
    std::vector<std::string_view> core;
    std::string_view pre;
};

std::vector<std::string_view> split_dots(std::string_view v) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto dot = v.find('.', start);
        out.push_back(v.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (dot == std::string_view::npos) return out;
        start = dot + 1;
    }
}

Parsed split_version(std::string_view v) {
    Parsed p;
    auto build = v.find('+');
    if (build != std::string_view::npos) v = v.substr(0, build);
    auto dash = v.find('-');
    if (dash != std::string_view::npos) {
        p.pre = v.substr(dash + 1);
        v = v.substr(0, dash);
    }
    p.core = split_dots(v);
    return p;
}

int compare_ident(std::string_view a, std::string_view b) {
    auto numeric = [](std::string_view s) { return !s.empty() && s.find_first_not_of("0123456789") == s.npos; };
    if (numeric(a) && numeric(b)) {
        auto strip = [](std::string_view s) {
            auto nz = s.find_first_not_of('0');
            return nz == s.npos ? std::string_view("0") : s.substr(nz);
        };
        a = strip(a);
        b = strip(b);
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    } else if (numeric(a) != numeric(b)) {
        return numeric(a) ? -1 : 1;
    }
    return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

}  // namespace

bool valid_version(std::string_view v) {
    static const std::regex re(R"(^\d+(\.\d+)*(-[0-9A-Za-z.-]+)?(\+[0-9A-Za-z.-]+)?$)");
    return std::regex_match(v.begin(), v.end(), re);
}

int compare_versions(std::string_view a, std::string_view b) {
    auto pa = split_version(a);
    auto pb = split_version(b);
    for (std::size_t i = 0; i < std::max(pa.core.size(), pb.core.size()); ++i) {
        auto x = i < pa.core.size() ? pa.core[i] : "0";
        auto y = i < pb.core.size() ? pb.core[i] : "0";
        if (int c = compare_ident(x, y)) return c;
    }
    if (pa.pre.empty() != pb.pre.empty()) return pa.pre.empty() ? 1 : -1;
    auto ia = split_dots(pa.pre);
    auto ib = split_dots(pb.pre);
    for (std::size_t i = 0; i < std::min(ia.size(), ib.size()); ++i) {
        if (int c = compare_ident(ia[i], ib[i])) return c;
    }
    if (ia.size() != ib.size()) return ia.size() < ib.size() ? -1 : 1;
    return 0;
}

PromptStore::PromptStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / kSessions, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create store at " + root_.string() + ": " + ec.message());
    FileLock lock(root_ / kLock, true);
    recover();
}

json PromptStore::read_index() const {
    auto path = root_ / kIndex;
    if (!fs::exists(path)) return empty_index();
    try {
        auto j = json::parse(read_text(path));
        if (j.value("format", "") != "minstrel-store" || !j.contains("prompts")) {
            throw Error(ErrorCode::Io, "store index " + path.string() + " is not a minstrel-store index");
        }
        return j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "store index " + path.string() + " is corrupt: " + e.what());
    }
}

void PromptStore::recover() {
    auto index = read_index();
    const auto& prompts = index["prompts"];
    for (const auto& top : fs::directory_iterator(root_)) {
        const auto name = top.path().filename().string();
        if (name.ends_with(".tmp")) {
            fs::remove(top.path());
            continue;
        }
        if (!top.is_directory()) continue;
        const bool sessions = name == kSessions;
        for (const auto& f : fs::directory_iterator(top.path())) {
            auto fname = f.path().filename().string();
            if (fname.ends_with(".tmp")) {
                fs::remove(f.path());
                continue;
            }
            if (sessions || !fname.ends_with(kPromptExt)) continue;
            auto version = fname.substr(0, fname.size() - kPromptExt.size());
            if (!prompts.contains(name) || !find_version(prompts[name], version)) fs::remove(f.path());
        }
        if (!sessions && fs::is_empty(top.path())) fs::remove(top.path());
    }
}

StoredPrompt PromptStore::save(const doc::PromptDocument& document) {
    auto report = doc::lint(document);
    if (report.has_errors()) {
        throw Error(ErrorCode::LintErrors, "cannot save '" + document.role_name() + "': " +
                                               std::to_string(report.count(doc::Severity::Error)) + " lint error(s)");
    }
    const auto id = text::slugify(document.role_name());
    if (id.empty()) throw Error(ErrorCode::Validation, "role name '" + document.role_name() + "' yields an empty id");
    const auto version = doc::profile_version(document).value_or(std::string(kDefaultVersion));
    if (!valid_version(version)) throw Error(ErrorCode::Validation, "version '" + version + "' is not semver-like");

    std::lock_guard guard(mu_);
    FileLock lock(root_ / kLock, true);
    recover();
    auto index = read_index();
    auto& prompts = index["prompts"];
    std::optional<std::string> parent;
    if (prompts.contains(id)) {
        if (find_version(prompts[id], version)) {
            throw Error(ErrorCode::VersionConflict, "'" + id + "' version " + version + " already exists");
        }
        for (const auto& v : prompts[id]["versions"]) {
            auto s = v["version"].get<std::string>();
            if (compare_versions(s, version) < 0 && (!parent || compare_versions(s, *parent) > 0)) parent = s;
        }
    } else {
        prompts[id] = {{"role_name", document.role_name()}, {"versions", json::array()}};
    }

    StoredPrompt out{id, document, version, now_utc(), parent};
    fs::create_directories(root_ / id);
    const auto file = root_ / id / (version + std::string(kPromptExt));
    write_atomic(file, doc::render(document), [&] {
        if (fault_hook_) fault_hook_("prompt-written");
    });
    prompts[id]["role_name"] = document.role_name();
    prompts[id]["versions"].push_back(
        {{"version", version}, {"created_at", out.created_at}, {"parent_version", parent ? json(*parent) : json(nullptr)}});
    write_atomic(root_ / kIndex, index.dump(2) + "\n", [&] {
        if (fault_hook_) fault_hook_("index-written");
    });
    return out;
}

StoredPrompt PromptStore::get(const std::string& id, const std::optional<std::string>& version) const {
    auto index = read_index();
    const auto& prompts = index["prompts"];
    if (!prompts.contains(id)) throw Error(ErrorCode::NotFound, "no prompt '" + id + "'");
    const auto& entry = prompts[id];
    const auto want = version ? *version : latest_of(entry);
    const json* v = find_version(entry, want);
    if (!v) throw Error(ErrorCode::NotFound, "no version " + want + " of '" + id + "'");
    auto text = read_text(root_ / id / (want + std::string(kPromptExt)));
    std::optional<std::string> parent;
    if (!(*v)["parent_version"].is_null()) parent = (*v)["parent_version"].get<std::string>();
    return {id, doc::parse(text), want, (*v)["created_at"].get<std::string>(), parent};
}

std::vector<ListEntry> PromptStore::list(const std::optional<std::string>& filter) const {
    auto index = read_index();
    std::vector<ListEntry> out;
    for (const auto& [id, entry] : index["prompts"].items()) {
        if (entry["versions"].empty()) continue;
        auto role = entry["role_name"].get<std::string>();
        if (filter && text::ifind(id, *filter) == std::string_view::npos &&
            text::ifind(role, *filter) == std::string_view::npos) {
            continue;
        }
        out.push_back({id, latest_of(entry), role});
    }
    std::sort(out.begin(), out.end(), [](const ListEntry& a, const ListEntry& b) { return a.id < b.id; });
    return out;
}

std::vector<std::string> PromptStore::versions(const std::string& id) const {
    auto index = read_index();
    if (!index["prompts"].contains(id)) throw Error(ErrorCode::NotFound, "no prompt '" + id + "'");
    std::vector<std::string> out;
    for (const auto& v : index["prompts"][id]["versions"]) out.push_back(v["version"].get<std::string>());
    return out;
}

void PromptStore::put_session(const std::string& session_id, const json& record) {
    check_session_id(session_id);
    std::lock_guard guard(mu_);
    FileLock lock(root_ / kLock, true);
    write_atomic(root_ / kSessions / (session_id + ".json"), record.dump(2) + "\n");
}

json PromptStore::get_session(const std::string& session_id) const {
    check_session_id(session_id);
    auto path = root_ / kSessions / (session_id + ".json");
    if (!fs::exists(path)) throw Error(ErrorCode::NotFound, "no stored session '" + session_id + "'");
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, "stored session " + path.string() + " is corrupt: " + e.what());
    }
}

std::vector<std::string> PromptStore::session_ids() const {
    std::vector<std::string> out;
    for (const auto& f : fs::directory_iterator(root_ / kSessions)) {
        auto name = f.path().filename().string();
        if (name.ends_with(".json")) out.push_back(name.substr(0, name.size() - 5));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace minstrel::store
