#pragma once

#include "minstrel/gateway/chat.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace minstrel::gateway {

/// Configuration fields recorded alongside each request. Deliberately
/// excludes the API key reference.
struct ConfigSnapshot {
    std::string model_id;
    double temperature = 0.0;
    int max_output_tokens = 0;

    bool operator==(const ConfigSnapshot&) const = default;
};

struct ChatExchange {
    std::vector<ChatMessage> messages;
    ConfigSnapshot config;
    std::string response;
    std::chrono::microseconds latency{0};
    std::uint64_t sequence_no = 0;
};

/// Append-only, thread-safe record of completed exchanges.
class ExchangeLog {
public:
    /// Assigns the next sequence number (1-based) and returns it.
    std::uint64_t append(ChatExchange exchange);
    std::vector<ChatExchange> snapshot() const;
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::vector<ChatExchange> exchanges_;
};

/// Deterministic JSON-lines transcript: a header line, then one record per
/// exchange in sequence order. Latency is not part of the export.
std::string export_transcript(const std::vector<ChatExchange>& exchanges);

/// A chat-completion endpoint. complete() validates the request, delegates
/// to send(), rejects empty completions and records every successful
/// exchange in the log. Safe to call from several threads.
class Gateway {
public:
    explicit Gateway(EndpointConfig defaults);
    virtual ~Gateway() = default;
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    std::string complete(const std::vector<ChatMessage>& messages);
    std::string complete(const EndpointConfig& config, const std::vector<ChatMessage>& messages);

    const EndpointConfig& defaults() const noexcept { return defaults_; }
    ExchangeLog& log() noexcept { return log_; }
    const ExchangeLog& log() const noexcept { return log_; }

protected:
    virtual std::string send(const EndpointConfig& config, const std::vector<ChatMessage>& messages) = 0;

private:
    EndpointConfig defaults_;
    ExchangeLog log_;
};

/// Creates one gateway per session so scripted fixtures and exchange logs
/// are never shared between sessions.
class GatewayFactory {
public:
    virtual ~GatewayFactory() = default;
    virtual std::unique_ptr<Gateway> create() const = 0;
    /// True when the gateways never touch the network.
    virtual bool offline() const noexcept = 0;
};

}  // namespace minstrel::gateway
