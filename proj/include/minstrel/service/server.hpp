#pragma once

#include "minstrel/orchestrator/session.hpp"
#include "minstrel/service/api.hpp"
#include "minstrel/store/store.hpp"

#include <filesystem>
#include <memory>
#include <optional>

namespace httplib {
class Server;
}

namespace minstrel::service {

struct ServiceOptions {
    /// Prompt library; also receives a copy of each session after every mutation.
    std::shared_ptr<store::PromptStore> store;
    /// Static assets served under /ui.
    std::optional<std::filesystem::path> ui_dir;
};

/// JSON view of a session: the export record plus per-draft module panels
/// and the modules changed from the previous draft.
nlohmann::json session_view(const orchestrator::SessionRecord& s);

/// The HTTP API over a session table and an optional prompt store.
class Service {
public:
    Service(const agents::AgentRegistry& registry, std::shared_ptr<const gateway::GatewayFactory> factory,
            ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and returns the port (port 0 picks a free one). Error(Io) on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void listen();
    void stop();
    /// Blocks until the listener accepts connections.
    void wait_until_ready();

    orchestrator::SessionManager& sessions() noexcept { return sessions_; }

private:
    void install_routes();

    const agents::AgentRegistry& registry_;
    std::shared_ptr<const gateway::GatewayFactory> factory_;
    ServiceOptions options_;
    orchestrator::SessionManager sessions_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace minstrel::service
