#pragma once

#include "minstrel/agents/registry.hpp"
#include "minstrel/gateway/gateway.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace minstrel::orchestrator {

using agents::AgentRegistry;
using agents::Comment;
using agents::TaskBrief;
using gateway::ChatMessage;

enum class StateKind { Created, Analyzed, Drafted, Tested, AwaitingUser, Reflected, Finalized, Failed };

std::string_view state_name(StateKind s) noexcept;
StateKind parse_state(std::string_view s);
/// The edges of the session machine; Failed is reachable from every non-terminal state.
bool transition_allowed(StateKind from, StateKind to) noexcept;

struct SessionState {
    StateKind kind = StateKind::Created;
    /// Set when kind == Failed: "<ErrorCode>: <message>".
    std::string reason;

    bool terminal() const noexcept { return kind == StateKind::Finalized || kind == StateKind::Failed; }
    bool operator==(const SessionState&) const = default;
};

struct SessionConfig {
    int max_reflections = 2;
    int test_turns = 3;
    /// Pause in AwaitingUser after each test pass.
    bool interactive = false;
    /// Finalize early once the mean commentator score of the latest test
    /// pass reaches this value. Off by default.
    std::optional<double> accept_score;
    /// Run designers and first-round commentators concurrently. Results do
    /// not depend on it; the order of the exchange log does.
    bool parallel = true;

    bool operator==(const SessionConfig&) const = default;
};

/// Throws Error(Validation).
void validate(const SessionConfig& config);

struct SessionRecord {
    std::string session_id;
    TaskBrief brief;
    agents::ActivationState activation;
    std::vector<doc::PromptDocument> drafts;
    std::vector<std::vector<ChatMessage>> transcripts;
    /// Commentator (final debate round) and user comments, append-only.
    std::vector<Comment> comments;
    std::vector<agents::ReflectionDirectives> directives_history;
    SessionState state;
    SessionConfig config;
    /// Every state entered, in order, starting with Created.
    std::vector<StateKind> state_log{StateKind::Created};
    /// comments[reflected_upto..] have not been reflected on yet.
    std::size_t reflected_upto = 0;

    /// Revisions applied so far.
    int reflections_done() const noexcept { return drafts.empty() ? 0 : static_cast<int>(drafts.size()) - 1; }
    /// Mean score of the commentator comments from the latest test pass.
    std::optional<double> latest_mean_score() const;
};

/// Deterministic id: slug of the first task words plus a hash of the task text.
std::string make_session_id(const TaskBrief& brief);

/// Design pass: analyzer, then one designer per activated module, assembled
/// in canonical order. Agent errors leave the session Failed with no drafts.
/// Throws Error(Validation) for an invalid brief or config.
SessionRecord start_session(const TaskBrief& brief, const SessionConfig& config, const AgentRegistry& registry,
                            gateway::Gateway& gw, std::string session_id = {});

/// Test pass over the latest draft. Requires Drafted (Error(InvalidState)
/// otherwise, session unchanged). Agent errors set Failed.
void run_test_pass(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw);

/// Appends user comments (author and stance forced to user). Allowed in
/// AwaitingUser and Tested; AwaitingUser moves to Tested.
/// Errors: SessionNotAwaitingInput, Validation (blank comment text).
void submit_user_comments(SessionRecord& s, std::vector<Comment> comments);

/// Reflector over the comments since the last reflection, then revision of
/// the keyed modules. Finalizes on empty directives, at the reflection bound
/// or at the accept score. Requires Tested (Error(InvalidState)).
void run_reflection_pass(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw);

/// Test and reflection passes until the session is terminal or awaits user input.
void run_to_completion(SessionRecord& s, const AgentRegistry& registry, gateway::Gateway& gw);

/// The last draft of a Finalized session. Error(NotFinalized) otherwise.
const doc::PromptDocument& finalize(const SessionRecord& s);

nlohmann::json to_json(const SessionConfig& c);
SessionConfig config_from_json(const nlohmann::json& j, SessionConfig base = {});
nlohmann::json to_json(const SessionRecord& s);
/// Throws Error(Validation) for malformed records.
SessionRecord session_from_json(const nlohmann::json& j);

/// Thread-safe handle: operations are serialized, snapshots never wait for
/// an operation's gateway calls.
class Session {
public:
    Session(SessionRecord record, const AgentRegistry& registry, std::unique_ptr<gateway::Gateway> gw);

    const std::string& id() const noexcept { return id_; }
    SessionRecord snapshot() const;
    StateKind state() const;

    void run_test_pass();
    void submit_user_comments(std::vector<Comment> comments);
    void run_reflection_pass();
    void run_to_completion();
    doc::PromptDocument finalize() const;

    gateway::Gateway& gateway() noexcept { return *gw_; }

private:
    template <typename Fn>
    void mutate(Fn&& fn);

    std::string id_;
    const AgentRegistry& registry_;
    std::unique_ptr<gateway::Gateway> gw_;
    std::mutex op_mu_;
    mutable std::shared_mutex record_mu_;
    SessionRecord record_;
};

/// Sessions by id, each with its own gateway from the factory.
class SessionManager {
public:
    SessionManager(const AgentRegistry& registry, std::shared_ptr<const gateway::GatewayFactory> factory)
        : registry_(registry), factory_(std::move(factory)) {}

    /// Runs the design pass; the returned session may be Failed.
    std::shared_ptr<Session> create(const TaskBrief& brief, const SessionConfig& config);
    /// Adopts an imported record under its id (suffixed when taken).
    std::shared_ptr<Session> adopt(SessionRecord record);
    /// Error(NotFound).
    std::shared_ptr<Session> get(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    std::string unique_id(const std::string& base) const;

    const AgentRegistry& registry_;
    std::shared_ptr<const gateway::GatewayFactory> factory_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace minstrel::orchestrator
