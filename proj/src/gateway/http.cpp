#include "minstrel/gateway/http.hpp"

#include "minstrel/error.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <thread>

namespace minstrel::gateway {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;    // without trailing '/'
};

Url split_url(const std::string& base) {
    auto scheme_end = base.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::InvalidConfig, "base_url lacks a scheme: " + base);
    auto scheme = base.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(ErrorCode::InvalidConfig, "unsupported base_url scheme '" + scheme + "'");
    }
    auto path_start = base.find('/', scheme_end + 3);
    Url u{base.substr(0, path_start), path_start == std::string::npos ? "" : base.substr(path_start)};
    while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
    return u;
}

std::string api_key(const EndpointConfig& c) {
    if (c.api_key_ref.empty()) return {};
    const char* v = std::getenv(c.api_key_ref.c_str());
    return v ? std::string(v) : std::string();
}

std::string excerpt(std::string body, const std::string& key) {
    if (!key.empty()) {
        for (auto pos = body.find(key); pos != std::string::npos; pos = body.find(key, pos)) {
            body.replace(pos, key.size(), "***");
        }
    }
    if (body.size() > 200) body = body.substr(0, 200) + "...";
    return body;
}

bool is_timeout(httplib::Error e) {
    return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read || e == httplib::Error::Write;
}

}  // namespace

HttpGateway::HttpGateway(EndpointConfig defaults) : Gateway(std::move(defaults)) {}

std::string HttpGateway::send(const EndpointConfig& config, const std::vector<ChatMessage>& messages) {
    const auto url = split_url(config.base_url);
    const auto key = api_key(config);

    nlohmann::json body = {{"model", config.model_id},
                           {"temperature", config.temperature},
                           {"max_tokens", config.max_output_tokens},
                           {"messages", nlohmann::json::array()}};
    for (const auto& m : messages) body["messages"].push_back(to_json(m));
    const auto payload = body.dump();

    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

    std::string last_failure;
    bool last_was_timeout = false;
    int last_status = 0;
    const int attempts = 1 + config.max_retries;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config.backoff * (1 << (attempt - 1)));
        auto res = client.Post(url.path + "/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_was_timeout = is_timeout(res.error());
            last_status = 0;
            last_failure = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_was_timeout = false;
            last_status = res->status;
            last_failure = excerpt(res->body, key);
            continue;
        }
        if (res->status != 200) {
            throw Error(ErrorCode::Transport,
                        "HTTP " + std::to_string(res->status) + ": " + excerpt(res->body, key));
        }
        try {
            auto j = nlohmann::json::parse(res->body);
            const auto& content = j.at("choices").at(0).at("message").at("content");
            return content.is_string() ? content.get<std::string>() : std::string();
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::Transport, "HTTP 200 with unreadable body: " + excerpt(res->body, key));
        }
    }
    if (attempts == 1) {
        if (last_was_timeout) throw Error(ErrorCode::Timeout, "request timed out: " + last_failure);
        throw Error(ErrorCode::Transport, (last_status ? "HTTP " + std::to_string(last_status) + ": " : std::string()) +
                                              last_failure);
    }
    throw Error(ErrorCode::RetriesExhausted,
                std::to_string(attempts) + " attempts failed; last: " +
                    (last_status ? "HTTP " + std::to_string(last_status) + ": " : std::string()) + last_failure);
}

EndpointConfig load_endpoint_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open endpoint config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "endpoint config " + path.string() + ": " + e.what());
    }
    return endpoint_from_json(j.contains("default") ? j["default"] : j);
}

}  // namespace minstrel::gateway
