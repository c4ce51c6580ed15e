#include "minstrel/gateway/chat.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

namespace minstrel::gateway {

std::string_view role_name(ChatRole r) noexcept {
    switch (r) {
        case ChatRole::System: return "system";
        case ChatRole::User: return "user";
        case ChatRole::Assistant: return "assistant";
    }
    return "";
}

ChatRole parse_role(std::string_view s) {
    if (s == "system") return ChatRole::System;
    if (s == "user") return ChatRole::User;
    if (s == "assistant") return ChatRole::Assistant;
    throw Error(ErrorCode::InvalidRequest, "unknown chat role '" + std::string(s) + "'");
}

void validate_messages(const std::vector<ChatMessage>& messages) {
    if (messages.empty()) throw Error(ErrorCode::InvalidRequest, "request has no messages");
    if (messages.front().role == ChatRole::Assistant) {
        throw Error(ErrorCode::InvalidRequest, "first message must be a system or user message");
    }
    for (std::size_t i = 0; i < messages.size(); ++i) {
        if (text::trim(messages[i].content).empty()) {
            throw Error(ErrorCode::InvalidRequest, "message " + std::to_string(i) + " is empty");
        }
    }
}

void validate(const EndpointConfig& c) {
    auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
    if (c.base_url.empty()) bad("base_url is empty");
    if (c.model_id.empty()) bad("model id is empty");
    if (!(c.temperature >= 0.0 && c.temperature <= 2.0)) bad("temperature must be within [0, 2]");
    if (c.max_output_tokens <= 0) bad("max_output_tokens must be positive");
    if (c.timeout.count() <= 0) bad("timeout must be positive");
    if (c.max_retries < 0 || c.max_retries > 5) bad("max_retries must be within [0, 5]");
    if (c.backoff.count() < 0) bad("backoff must not be negative");
}

nlohmann::json to_json(const EndpointConfig& c) {
    return {{"base_url", c.base_url},
            {"model", c.model_id},
            {"api_key_env", c.api_key_ref},
            {"temperature", c.temperature},
            {"max_tokens", c.max_output_tokens},
            {"timeout_ms", c.timeout.count()},
            {"max_retries", c.max_retries},
            {"backoff_ms", c.backoff.count()}};
}

EndpointConfig endpoint_from_json(const nlohmann::json& j, EndpointConfig c) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "endpoint config must be a JSON object");
    try {
        if (j.contains("base_url")) c.base_url = j.at("base_url").get<std::string>();
        if (j.contains("model")) c.model_id = j.at("model").get<std::string>();
        if (j.contains("api_key_env")) c.api_key_ref = j.at("api_key_env").get<std::string>();
        if (j.contains("temperature")) c.temperature = j.at("temperature").get<double>();
        if (j.contains("max_tokens")) c.max_output_tokens = j.at("max_tokens").get<int>();
        if (j.contains("timeout_ms")) c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
        if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
        if (j.contains("backoff_ms")) c.backoff = std::chrono::milliseconds(j.at("backoff_ms").get<long>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("endpoint config: ") + e.what());
    }
    validate(c);
    return c;
}

nlohmann::json to_json(const ChatMessage& m) {
    return {{"role", role_name(m.role)}, {"content", m.content}};
}

ChatMessage message_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("role") || !j.contains("content") || !j["role"].is_string() ||
        !j["content"].is_string()) {
        throw Error(ErrorCode::InvalidRequest, "chat message needs string 'role' and 'content'");
    }
    return ChatMessage{parse_role(j["role"].get<std::string>()), j["content"].get<std::string>()};
}

}  // namespace minstrel::gateway
