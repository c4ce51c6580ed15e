#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace minstrel::gateway {

enum class ChatRole { System, User, Assistant };

std::string_view role_name(ChatRole r) noexcept;
/// Throws Error(InvalidRequest) for anything but system/user/assistant.
ChatRole parse_role(std::string_view s);

struct ChatMessage {
    ChatRole role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

inline ChatMessage system_message(std::string content) { return {ChatRole::System, std::move(content)}; }
inline ChatMessage user_message(std::string content) { return {ChatRole::User, std::move(content)}; }
inline ChatMessage assistant_message(std::string content) { return {ChatRole::Assistant, std::move(content)}; }

/// Throws Error(InvalidRequest) when the list is empty, a message is blank,
/// or the first message is an assistant turn.
void validate_messages(const std::vector<ChatMessage>& messages);

/// One OpenAI-compatible chat-completions endpoint.
struct EndpointConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string model_id = "gpt-4-turbo";
    /// Name of the environment variable holding the API key; never the key itself.
    std::string api_key_ref = "OPENAI_API_KEY";
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 2;
    /// First retry delay; doubles on each further attempt.
    std::chrono::milliseconds backoff{500};

    bool operator==(const EndpointConfig&) const = default;
};

/// Throws Error(InvalidConfig) when a field is out of range.
void validate(const EndpointConfig& config);

nlohmann::json to_json(const EndpointConfig& config);
/// Missing keys keep their defaults. Validates the result.
EndpointConfig endpoint_from_json(const nlohmann::json& j, EndpointConfig base = {});

nlohmann::json to_json(const ChatMessage& m);
ChatMessage message_from_json(const nlohmann::json& j);

}  // namespace minstrel::gateway
