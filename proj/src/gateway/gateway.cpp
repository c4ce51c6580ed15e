#include "minstrel/gateway/gateway.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

namespace minstrel::gateway {

std::uint64_t ExchangeLog::append(ChatExchange exchange) {
    std::lock_guard lock(mu_);
    exchange.sequence_no = exchanges_.size() + 1;
    exchanges_.push_back(std::move(exchange));
    return exchanges_.back().sequence_no;
}

std::vector<ChatExchange> ExchangeLog::snapshot() const {
    std::lock_guard lock(mu_);
    return exchanges_;
}

std::size_t ExchangeLog::size() const {
    std::lock_guard lock(mu_);
    return exchanges_.size();
}

std::string export_transcript(const std::vector<ChatExchange>& exchanges) {
    std::string out;
    nlohmann::ordered_json header = {
        {"format", "minstrel-transcript"}, {"version", 1}, {"exchanges", exchanges.size()}};
    out += header.dump() + "\n";
    for (const auto& ex : exchanges) {
        nlohmann::ordered_json rec;
        rec["seq"] = ex.sequence_no;
        rec["model"] = ex.config.model_id;
        rec["temperature"] = ex.config.temperature;
        rec["max_tokens"] = ex.config.max_output_tokens;
        auto msgs = nlohmann::ordered_json::array();
        for (const auto& m : ex.messages) {
            msgs.push_back(nlohmann::ordered_json{{"role", role_name(m.role)}, {"content", m.content}});
        }
        rec["messages"] = std::move(msgs);
        rec["response"] = ex.response;
        out += rec.dump() + "\n";
    }
    return out;
}

Gateway::Gateway(EndpointConfig defaults) : defaults_(std::move(defaults)) { validate(defaults_); }

std::string Gateway::complete(const std::vector<ChatMessage>& messages) { return complete(defaults_, messages); }

std::string Gateway::complete(const EndpointConfig& config, const std::vector<ChatMessage>& messages) {
    validate(config);
    validate_messages(messages);
    auto start = std::chrono::steady_clock::now();
    auto response = send(config, messages);
    auto latency = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
    if (text::trim(response).empty()) {
        throw Error(ErrorCode::EmptyCompletion, "endpoint returned an empty completion");
    }
    log_.append(ChatExchange{messages, ConfigSnapshot{config.model_id, config.temperature, config.max_output_tokens},
                             response, latency, 0});
    return response;
}

}  // namespace minstrel::gateway
