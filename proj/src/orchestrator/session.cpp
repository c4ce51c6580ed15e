#include "minstrel/orchestrator/session.hpp"

#include "minstrel/agents/json.hpp"
#include "minstrel/agents/runners.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <cstdio>
#include <future>
#include <sstream>
#include <stdexcept>

namespace minstrel::orchestrator {

using agents::NamedModule;
using nlohmann::json;

namespace {

constexpr std::pair<StateKind, std::string_view> kStateNames[] = {
    {StateKind::Created, "created"},     {StateKind::Analyzed, "analyzed"},
    {StateKind::Drafted, "drafted"},     {StateKind::Tested, "tested"},
    {StateKind::AwaitingUser, "awaiting_user"}, {StateKind::Reflected, "reflected"},
    {StateKind::Finalized, "finalized"}, {StateKind::Failed, "failed"},
};

void enter(SessionRecord& s, StateKind next) {
    if (!transition_allowed(s.state.kind, next)) {
        throw std::logic_error("illegal session transition " + std::string(state_name(s.state.kind)) + " -> " +
                               std::string(state_name(next)));
    }
    s.state.kind = next;
    s.state_log.push_back(next);
}

void fail(SessionRecord& s, const Error& e) {
    enter(s, StateKind::Failed);
    s.state.reason = std::string(e.code_name()) + ": " + e.what();
}

void require_state(const SessionRecord& s, StateKind want, std::string_view op) {
    if (s.state.kind != want) {
        throw Error(ErrorCode::InvalidState, std::string(op) + " requires state '" + std::string(state_name(want)) +
                                                 "', session '" + s.session_id + "' is '" +
                                                 std::string(state_name(s.state.kind)) + "'");
    }
}

/// Runs fn for every module, concurrently when asked; rethrows the first
/// failure in module order only after every call has finished.
template <typename Fn>
std::vector<doc::ModuleBlock> for_modules(const std::vector<NamedModule>& modules, bool parallel, Fn fn) {
    std::vector<doc::ModuleBlock> out;
    if (!parallel) {
        for (auto m : modules) out.push_back(fn(m));
        return out;
    }
    std::vector<std::future<doc::ModuleBlock>> futures;
    for (auto m : modules) futures.push_back(std::async(std::launch::async, fn, m));
    for (auto& f : futures) f.wait();
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

void finalize_now(SessionRecord& s) {
    auto report = doc::lint(s.drafts.back());
    if (report.has_errors()) {
        fail(s, Error(ErrorCode::LintErrors, "final draft has " + std::to_string(report.count(doc::Severity::Error)) +
                                                 " lint error(s)"));
        return;
    }
    enter(s, StateKind::Finalized);
}

std::uint32_t fnv1a(std::string_view s) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : s) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::Validation, "session record: " + why); }

}  // namespace

std::string_view state_name(StateKind s) noexcept {
    for (const auto& [k, n] : kStateNames) {
        if (k == s) return n;
    }
    return "unknown";
}

StateKind parse_state(std::string_view s) {
    for (const auto& [k, n] : kStateNames) {
        if (n == s) return k;
    }
    throw Error(ErrorCode::Validation, "unknown session state '" + std::string(s) + "'");
}

bool transition_allowed(StateKind from, StateKind to) noexcept {
    using S = StateKind;
    if (from == S::Finalized || from == S::Failed) return false;
    if (to == S::Failed) return true;
    switch (from) {
        case S::Created: return to == S::Analyzed;
        case S::Analyzed: return to == S::Drafted;
        case S::Drafted: return to == S::Tested;
        case S::Tested: return to == S::AwaitingUser || to == S::Reflected;
        case S::AwaitingUser: return to == S::Tested;
        case S::Reflected: return to == S::Drafted || to == S::Finalized;
        default: return false;
    }
}

void validate(const SessionConfig& c) {
    if (c.max_reflections < 0) throw Error(ErrorCode::Validation, "max_reflections must be >= 0");
    if (c.test_turns < 1) throw Error(ErrorCode::Validation, "test_turns must be >= 1");
    if (c.accept_score && (*c.accept_score < 1.0 || *c.accept_score > 10.0)) {
        throw Error(ErrorCode::Validation, "accept_score must be within 1..10");
    }
}

std::optional<double> SessionRecord::latest_mean_score() const {
    constexpr std::size_t kPanel = 5;
    double sum = 0;
    std::size_t n = 0;
    for (auto it = comments.rbegin(); it != comments.rend() && n < kPanel; ++it) {
        if (it->stance == agents::Stance::User || !it->score) continue;
        sum += *it->score;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

std::string make_session_id(const TaskBrief& brief) {
    std::istringstream words(brief.task_text);
    std::string w, head;
    for (int i = 0; i < 4 && words >> w; ++i) head += (head.empty() ? "" : " ") + w;
    auto slug = text::slugify(head);
    if (slug.size() > 40) slug.resize(40);
    while (!slug.empty() && slug.back() == '-') slug.pop_back();
    if (slug.empty()) slug = "session";
    char hash[9];
    std::snprintf(hash, sizeof hash, "%08x",
                  fnv1a(brief.task_text + "\n" + brief.domain_hint.value_or("") + "\n" + brief.language));
    return slug + "-" + hash;
}

SessionRecord start_session(const TaskBrief& brief, const SessionConfig& config, const AgentRegistry& registry,
                            gateway::Gateway& gw, std::string session_id) {
    agents::validate(brief);
    validate(config);
    SessionRecord s;
    s.session_id = session_id.empty() ? make_session_id(brief) : std::move(session_id);
    s.brief = brief;
    s.config = config;
    try {
        auto activation = agents::run_analyzer(registry.analyzer(), brief, gw);
        s.activation = activation;
        enter(s, StateKind::Analyzed);

        std::vector<NamedModule> modules(activation.activated.begin(), activation.activated.end());
        auto blocks = for_modules(modules, config.parallel, [&](NamedModule m) {
            return agents::run_designer(registry.designer(m), brief, nullptr, std::nullopt, gw);
        });
        doc::PromptDocument draft(blocks.front().title.value_or(""));
        for (auto& b : blocks) {
            if (b.kind == doc::ModuleKind(NamedModule::Role)) {
                draft.put(std::move(b));
            } else {
                draft.add(std::move(b));
            }
        }
        s.drafts.push_back(std::move(draft));
        enter(s, StateKind::Drafted);
    } catch (const Error& e) {
        fail(s, e);
    }
    return s;
}

void run_test_pass(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw) {
    require_state(s, StateKind::Drafted, "test pass");
    try {
        auto transcript = agents::run_simulator_dialogue(registry.simulator(), registry.questioner(), s.drafts.back(),
                                                         s.brief, s.config.test_turns, gw);
        auto round = agents::run_commentators(registry.commentators(), transcript, s.brief, gw, s.config.parallel);
        s.transcripts.push_back(std::move(transcript));
        s.comments.insert(s.comments.end(), round.final.begin(), round.final.end());
        enter(s, StateKind::Tested);
        if (s.config.interactive) enter(s, StateKind::AwaitingUser);
    } catch (const Error& e) {
        fail(s, e);
    }
}

void submit_user_comments(SessionRecord& s, std::vector<Comment> comments) {
    if (s.state.kind != StateKind::AwaitingUser && s.state.kind != StateKind::Tested) {
        throw Error(ErrorCode::SessionNotAwaitingInput,
                    "session '" + s.session_id + "' is '" + std::string(state_name(s.state.kind)) +
                        "' and does not accept comments");
    }
    for (auto& c : comments) {
        bool has_text = std::any_of(c.issues.begin(), c.issues.end(),
                                    [](const agents::Issue& i) { return !text::trim(i.text).empty(); });
        if (!has_text) throw Error(ErrorCode::Validation, "user comment has no text");
        c.author = std::string(agents::kUserAuthor);
        c.stance = agents::Stance::User;
        c.score.reset();
    }
    s.comments.insert(s.comments.end(), comments.begin(), comments.end());
    if (s.state.kind == StateKind::AwaitingUser) enter(s, StateKind::Tested);
}

void run_reflection_pass(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw) {
    if (s.state.kind == StateKind::AwaitingUser) {
        throw Error(ErrorCode::InvalidState, "session '" + s.session_id + "' is awaiting user comments");
    }
    require_state(s, StateKind::Tested, "reflection pass");

    if (s.config.accept_score) {
        auto mean = s.latest_mean_score();
        if (mean && *mean >= *s.config.accept_score) {
            s.reflected_upto = s.comments.size();
            enter(s, StateKind::Reflected);
            finalize_now(s);
            return;
        }
    }

    std::vector<Comment> pending(s.comments.begin() + static_cast<std::ptrdiff_t>(s.reflected_upto), s.comments.end());
    try {
        auto directives = agents::run_reflector(registry.reflector(), pending, gw, &s.brief);
        const bool stop = directives.converged() || s.reflections_done() >= s.config.max_reflections;
        std::vector<doc::ModuleBlock> revised;
        if (!stop) {
            const auto& current = s.drafts.back();
            auto keys = directives.keys();
            std::vector<NamedModule> modules(keys.begin(), keys.end());
            revised = for_modules(modules, s.config.parallel, [&](NamedModule m) {
                return agents::run_designer(registry.designer(m), s.brief, current.find(doc::ModuleKind(m)),
                                            directives.directives.at(m), gw);
            });
        }
        s.directives_history.push_back(directives);
        s.reflected_upto = s.comments.size();
        enter(s, StateKind::Reflected);
        if (stop) {
            finalize_now(s);
            return;
        }
        auto next = s.drafts.back();
        for (auto& b : revised) next.put(std::move(b));
        s.drafts.push_back(std::move(next));
        enter(s, StateKind::Drafted);
    } catch (const Error& e) {
        fail(s, e);
    }
}

void run_to_completion(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw) {
    while (!s.state.terminal()) {
        switch (s.state.kind) {
            case StateKind::Drafted: run_test_pass(s, registry, gw); break;
            case StateKind::Tested: run_reflection_pass(s, registry, gw); break;
            default: return;
        }
    }
}

const doc::PromptDocument& finalize(const SessionRecord& s) {
    if (s.state.kind != StateKind::Finalized || s.drafts.empty()) {
        throw Error(ErrorCode::NotFinalized,
                    "session '" + s.session_id + "' is '" + std::string(state_name(s.state.kind)) + "'");
    }
    return s.drafts.back();
}

json to_json(const SessionConfig& c) {
    return {{"max_reflections", c.max_reflections},
            {"test_turns", c.test_turns},
            {"interactive", c.interactive},
            {"accept_score", c.accept_score ? json(*c.accept_score) : json(nullptr)},
            {"parallel", c.parallel}};
}

SessionConfig config_from_json(const json& j, SessionConfig base) {
    if (!j.is_object()) throw Error(ErrorCode::Validation, "config must be an object");
    try {
        if (j.contains("max_reflections")) base.max_reflections = j["max_reflections"].get<int>();
        if (j.contains("test_turns")) base.test_turns = j["test_turns"].get<int>();
        if (j.contains("interactive")) base.interactive = j["interactive"].get<bool>();
        if (j.contains("accept_score")) {
            base.accept_score = j["accept_score"].is_null() ? std::nullopt
                                                            : std::optional<double>(j["accept_score"].get<double>());
        }
        if (j.contains("parallel")) base.parallel = j["parallel"].get<bool>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("config: ") + e.what());
    }
    validate(base);
    return base;
}

json to_json(const SessionRecord& s) {
    json drafts = json::array();
    for (const auto& d : s.drafts) drafts.push_back(doc::render(d));
    json transcripts = json::array();
    for (const auto& t : s.transcripts) {
        json msgs = json::array();
        for (const auto& m : t) msgs.push_back(gateway::to_json(m));
        transcripts.push_back(std::move(msgs));
    }
    json comments = json::array();
    for (const auto& c : s.comments) comments.push_back(agents::to_json(c));
    json directives = json::array();
    for (const auto& d : s.directives_history) directives.push_back(agents::to_json(d));
    json log = json::array();
    for (auto k : s.state_log) log.push_back(state_name(k));
    json state = {{"name", state_name(s.state.kind)}};
    if (s.state.kind == StateKind::Failed) state["reason"] = s.state.reason;
    return {{"format", "minstrel-session"},
            {"version", 1},
            {"session_id", s.session_id},
            {"brief", agents::to_json(s.brief)},
            {"config", to_json(s.config)},
            {"activation", agents::to_json(s.activation)},
            {"drafts", drafts},
            {"transcripts", transcripts},
            {"comments", comments},
            {"directives_history", directives},
            {"state", state},
            {"state_log", log},
            {"reflected_upto", s.reflected_upto}};
}

SessionRecord session_from_json(const json& j) {
    if (!j.is_object() || j.value("format", "") != "minstrel-session") invalid("not a minstrel-session document");
    if (j.value("version", 0) != 1) invalid("unsupported version");
    try {
        SessionRecord s;
        s.session_id = j.at("session_id").get<std::string>();
        if (s.session_id.empty()) invalid("empty session_id");
        s.brief = agents::brief_from_json(j.at("brief"));
        s.config = config_from_json(j.at("config"));
        s.activation = agents::activation_from_json(j.at("activation"));
        for (const auto& d : j.at("drafts")) s.drafts.push_back(doc::parse(d.get<std::string>()));
        for (const auto& t : j.at("transcripts")) {
            std::vector<ChatMessage> msgs;
            for (const auto& m : t) msgs.push_back(gateway::message_from_json(m));
            s.transcripts.push_back(std::move(msgs));
        }
        for (const auto& c : j.at("comments")) s.comments.push_back(agents::comment_from_json(c));
        for (const auto& d : j.at("directives_history")) s.directives_history.push_back(agents::directives_from_json(d));
        s.state.kind = parse_state(j.at("state").at("name").get<std::string>());
        s.state.reason = j.at("state").value("reason", "");
        s.state_log.clear();
        for (const auto& k : j.at("state_log")) s.state_log.push_back(parse_state(k.get<std::string>()));
        if (s.state_log.empty() || s.state_log.back() != s.state.kind) invalid("state_log does not end in state");
        for (std::size_t i = 1; i < s.state_log.size(); ++i) {
            if (!transition_allowed(s.state_log[i - 1], s.state_log[i])) invalid("state_log has an illegal transition");
        }
        s.reflected_upto = j.at("reflected_upto").get<std::size_t>();
        if (s.reflected_upto > s.comments.size()) invalid("reflected_upto out of range");
        return s;
    } catch (const json::exception& e) {
        invalid(e.what());
    }
}

Session::Session(SessionRecord record, const AgentRegistry& registry, std::unique_ptr<gateway::Gateway> gw)
    : id_(record.session_id), registry_(registry), gw_(std::move(gw)), record_(std::move(record)) {}

template <typename Fn>
void Session::mutate(Fn&& fn) {
    std::lock_guard op(op_mu_);
    SessionRecord work;
    {
        std::shared_lock read(record_mu_);
        work = record_;
    }
    fn(work);
    std::unique_lock write(record_mu_);
    record_ = std::move(work);
}

SessionRecord Session::snapshot() const {
    std::shared_lock read(record_mu_);
    return record_;
}

StateKind Session::state() const {
    std::shared_lock read(record_mu_);
    return record_.state.kind;
}

void Session::run_test_pass() {
    mutate([&](SessionRecord& s) { orchestrator::run_test_pass(s, registry_, *gw_); });
}

void Session::submit_user_comments(std::vector<Comment> comments) {
    mutate([&](SessionRecord& s) { orchestrator::submit_user_comments(s, std::move(comments)); });
}

void Session::run_reflection_pass() {
    mutate([&](SessionRecord& s) { orchestrator::run_reflection_pass(s, registry_, *gw_); });
}

void Session::run_to_completion() {
    mutate([&](SessionRecord& s) { orchestrator::run_to_completion(s, registry_, *gw_); });
}

doc::PromptDocument Session::finalize() const {
    std::shared_lock read(record_mu_);
    return orchestrator::finalize(record_);
}

std::string SessionManager::unique_id(const std::string& base) const {
    if (!sessions_.contains(base)) return base;
    for (int n = 2;; ++n) {
        auto candidate = base + "-" + std::to_string(n);
        if (!sessions_.contains(candidate)) return candidate;
    }
}

std::shared_ptr<Session> SessionManager::create(const TaskBrief& brief, const SessionConfig& config) {
    agents::validate(brief);
    validate(config);
    std::string id;
    {
        std::lock_guard lock(mu_);
        id = unique_id(make_session_id(brief));
        sessions_[id] = nullptr;  // reserved while the design pass runs
    }
    try {
        auto gw = factory_->create();
        auto record = start_session(brief, config, registry_, *gw, id);
        auto session = std::make_shared<Session>(std::move(record), registry_, std::move(gw));
        std::lock_guard lock(mu_);
        sessions_[id] = session;
        return session;
    } catch (...) {
        std::lock_guard lock(mu_);
        sessions_.erase(id);
        throw;
    }
}

std::shared_ptr<Session> SessionManager::adopt(SessionRecord record) {
    std::lock_guard lock(mu_);
    record.session_id = unique_id(record.session_id);
    auto session = std::make_shared<Session>(std::move(record), registry_, factory_->create());
    sessions_[session->id()] = session;
    return session;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end() || !it->second) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
    return it->second;
}

std::vector<std::string> SessionManager::ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) {
        if (s) out.push_back(id);
    }
    return out;
}

}  // namespace minstrel::orchestrator
