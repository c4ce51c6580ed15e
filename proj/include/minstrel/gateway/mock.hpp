#pragma once

#include "minstrel/gateway/gateway.hpp"

#include <filesystem>
#include <optional>

namespace minstrel::gateway {

/// One scripted response. With `match` set the fixture answers the first
/// request whose last message contains that substring; with `at` set it
/// answers exactly that call (0-based); with neither it is positional and
/// answers, in list order, calls nothing else claims.
struct Fixture {
    std::optional<std::string> match;
    std::optional<std::size_t> at;
    std::string response;
};

/// Deterministic offline gateway. Each fixture is used once. Resolution
/// order per call: pinned `at` fixture, then substring fixtures (several
/// unconsumed fixtures with the same substring form a queue; two different
/// substrings matching the same request is AmbiguousFixture), then the next
/// positional fixture. Nothing left: EmptyCompletion.
class ScriptedMock final : public Gateway {
public:
    explicit ScriptedMock(std::vector<Fixture> fixtures, EndpointConfig defaults = offline_endpoint());

    std::size_t calls() const;
    std::size_t remaining() const;

    static EndpointConfig offline_endpoint();

protected:
    std::string send(const EndpointConfig& config, const std::vector<ChatMessage>& messages) override;

private:
    mutable std::mutex mu_;
    std::vector<Fixture> fixtures_;
    std::vector<bool> used_;
    std::size_t calls_ = 0;
};

/// Throws Error(InvalidConfig) when fixtures is empty.
std::unique_ptr<ScriptedMock> script_mock(std::vector<Fixture> fixtures);

/// `{"fixtures": [{"match"|"at"?, "response"}...]}`.
std::vector<Fixture> fixtures_from_json(const nlohmann::json& j);
/// Accepts a pack file or a directory holding `pack.json`.
std::vector<Fixture> load_fixture_pack(const std::filesystem::path& path);

class MockGatewayFactory final : public GatewayFactory {
public:
    explicit MockGatewayFactory(std::vector<Fixture> fixtures) : fixtures_(std::move(fixtures)) {}
    std::unique_ptr<Gateway> create() const override { return script_mock(fixtures_); }
    bool offline() const noexcept override { return true; }

private:
    std::vector<Fixture> fixtures_;
};

}  // namespace minstrel::gateway
