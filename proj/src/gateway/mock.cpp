#include "minstrel/gateway/mock.hpp"

#include "minstrel/error.hpp"

#include <fstream>

namespace minstrel::gateway {

ScriptedMock::ScriptedMock(std::vector<Fixture> fixtures, EndpointConfig defaults)
    : Gateway(std::move(defaults)), fixtures_(std::move(fixtures)), used_(fixtures_.size(), false) {}

EndpointConfig ScriptedMock::offline_endpoint() {
    EndpointConfig c;
    c.base_url = "mock://fixtures";
    c.model_id = "scripted-mock";
    c.api_key_ref.clear();
    c.max_retries = 0;
    return c;
}

std::size_t ScriptedMock::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::size_t ScriptedMock::remaining() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (bool u : used_) n += u ? 0 : 1;
    return n;
}

std::string ScriptedMock::send(const EndpointConfig&, const std::vector<ChatMessage>& messages) {
    std::lock_guard lock(mu_);
    const std::size_t call = calls_++;
    const std::string& probe = messages.back().content;

    auto take = [&](std::size_t i) {
        used_[i] = true;
        return fixtures_[i].response;
    };

    std::optional<std::size_t> pinned;
    for (std::size_t i = 0; i < fixtures_.size(); ++i) {
        if (used_[i] || !fixtures_[i].at || *fixtures_[i].at != call) continue;
        if (pinned) throw Error(ErrorCode::AmbiguousFixture, "two fixtures pinned to call " + std::to_string(call));
        pinned = i;
    }
    if (pinned) return take(*pinned);

    std::optional<std::size_t> matched;
    for (std::size_t i = 0; i < fixtures_.size(); ++i) {
        const auto& f = fixtures_[i];
        if (used_[i] || f.at || !f.match || probe.find(*f.match) == std::string::npos) continue;
        if (!matched) {
            matched = i;
        } else if (*fixtures_[*matched].match != *f.match) {
            throw Error(ErrorCode::AmbiguousFixture,
                        "fixtures '" + *fixtures_[*matched].match + "' and '" + *f.match + "' both match call " +
                            std::to_string(call));
        }
    }
    if (matched) return take(*matched);

    for (std::size_t i = 0; i < fixtures_.size(); ++i) {
        if (!used_[i] && !fixtures_[i].at && !fixtures_[i].match) return take(i);
    }
    throw Error(ErrorCode::EmptyCompletion, "no scripted response left for call " + std::to_string(call));
}

std::unique_ptr<ScriptedMock> script_mock(std::vector<Fixture> fixtures) {
    if (fixtures.empty()) throw Error(ErrorCode::InvalidConfig, "fixture list is empty");
    return std::make_unique<ScriptedMock>(std::move(fixtures));
}

std::vector<Fixture> fixtures_from_json(const nlohmann::json& j) {
    const auto& list = j.is_array() ? j : j.value("fixtures", nlohmann::json::array());
    if (!list.is_array()) throw Error(ErrorCode::InvalidConfig, "'fixtures' must be an array");
    std::vector<Fixture> out;
    for (const auto& item : list) {
        if (!item.is_object() || !item.contains("response") || !item["response"].is_string()) {
            throw Error(ErrorCode::InvalidConfig, "each fixture needs a string 'response'");
        }
        Fixture f;
        f.response = item["response"].get<std::string>();
        if (item.contains("match")) f.match = item["match"].get<std::string>();
        if (item.contains("at")) f.at = item["at"].get<std::size_t>();
        if (f.match && f.at) throw Error(ErrorCode::InvalidConfig, "a fixture takes either 'match' or 'at'");
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<Fixture> load_fixture_pack(const std::filesystem::path& path) {
    auto file = std::filesystem::is_directory(path) ? path / "pack.json" : path;
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::Io, "cannot open fixture pack " + file.string());
    try {
        return fixtures_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "fixture pack " + file.string() + ": " + e.what());
    }
}

}  // namespace minstrel::gateway
