#pragma once

#include "minstrel/gateway/gateway.hpp"

#include <filesystem>

namespace minstrel::gateway {

/// Chat-completions client over HTTP(S). Retries transport failures and
/// 5xx replies up to max_retries times with exponential backoff; any other
/// status fails immediately with Transport.
class HttpGateway final : public Gateway {
public:
    explicit HttpGateway(EndpointConfig defaults);

protected:
    std::string send(const EndpointConfig& config, const std::vector<ChatMessage>& messages) override;
};

class HttpGatewayFactory final : public GatewayFactory {
public:
    explicit HttpGatewayFactory(EndpointConfig config) : config_(std::move(config)) {}
    std::unique_ptr<Gateway> create() const override { return std::make_unique<HttpGateway>(config_); }
    bool offline() const noexcept override { return false; }

private:
    EndpointConfig config_;
};

/// Reads `{"default": {...}}` (or a bare endpoint object) from the file.
EndpointConfig load_endpoint_config(const std::filesystem::path& path);

}  // namespace minstrel::gateway
