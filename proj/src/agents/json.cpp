#include "minstrel/agents/json.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

namespace minstrel::agents {

using nlohmann::json;

namespace {
[[noreturn]] void invalid(const std::string& why) { throw Error(ErrorCode::Validation, why); }

std::string module_key(NamedModule m) { return std::string(doc::module_name(m)); }
}  // namespace

NamedModule module_from_name(std::string_view name) {
    if (auto m = doc::lookup_named_module(name)) return *m;
    throw Error(ErrorCode::UnknownModuleName, "unknown module name '" + std::string(name) + "'");
}

json to_json(const TaskBrief& b) {
    json j = {{"task", b.task_text}, {"language", b.language}};
    j["domain"] = b.domain_hint ? json(*b.domain_hint) : json(nullptr);
    return j;
}

TaskBrief brief_from_json(const json& j) {
    if (!j.is_object() || !j.contains("task") || !j["task"].is_string()) invalid("brief needs a string 'task'");
    TaskBrief b;
    b.task_text = j["task"].get<std::string>();
    if (j.contains("domain") && j["domain"].is_string()) b.domain_hint = j["domain"].get<std::string>();
    if (j.contains("language")) {
        if (!j["language"].is_string()) invalid("brief 'language' must be a string");
        b.language = j["language"].get<std::string>();
    }
    validate(b);
    return b;
}

json to_json(const ActivationState& a) {
    json activated = json::array();
    for (auto m : a.activated) activated.push_back(module_key(m));
    json rationale = json::object();
    for (const auto& [m, why] : a.rationale) rationale[module_key(m)] = why;
    return {{"activated", activated}, {"rationale", rationale}};
}

ActivationState activation_from_json(const json& j) {
    ActivationState a;
    for (const auto& m : j.at("activated")) a.activated.insert(module_from_name(m.get<std::string>()));
    if (j.contains("rationale")) {
        for (const auto& [k, v] : j["rationale"].items()) a.rationale[module_from_name(k)] = v.get<std::string>();
    }
    return a;
}

json to_json(const Comment& c) {
    json issues = json::array();
    for (const auto& i : c.issues) {
        issues.push_back({{"module", i.module_hint ? json(module_key(*i.module_hint)) : json(nullptr)}, {"text", i.text}});
    }
    return {{"author", c.author},
            {"stance", stance_name(c.stance)},
            {"score", c.score ? json(*c.score) : json(nullptr)},
            {"issues", issues}};
}

Comment comment_from_json(const json& j) {
    if (!j.is_object()) invalid("comment must be an object");
    Comment c;
    c.author = j.value("author", std::string(kUserAuthor));
    c.stance = j.contains("stance") ? parse_stance(j["stance"].get<std::string>()) : Stance::User;
    if (j.contains("score") && !j["score"].is_null()) {
        if (!j["score"].is_number_integer()) invalid("comment score must be an integer");
        c.score = j["score"].get<int>();
        if (*c.score < 1 || *c.score > 10) invalid("comment score must be within 1..10");
    }
    if (j.contains("text") && j["text"].is_string()) c.issues.push_back(Issue{std::nullopt, j["text"].get<std::string>()});
    if (j.contains("issues")) {
        if (!j["issues"].is_array()) invalid("comment 'issues' must be an array");
        for (const auto& i : j["issues"]) {
            if (!i.is_object() || !i.contains("text") || !i["text"].is_string()) invalid("issue needs a string 'text'");
            Issue issue{std::nullopt, i["text"].get<std::string>()};
            if (i.contains("module") && i["module"].is_string()) issue.module_hint = module_from_name(i["module"].get<std::string>());
            c.issues.push_back(std::move(issue));
        }
    }
    if (c.stance != Stance::User && !c.score) invalid("commentator comments carry a score");
    return c;
}

json to_json(const ReflectionDirectives& d) {
    json dir = json::object();
    for (const auto& [m, text] : d.directives) dir[module_key(m)] = text;
    return {{"directives", dir}};
}

ReflectionDirectives directives_from_json(const json& j) {
    ReflectionDirectives d;
    for (const auto& [k, v] : j.at("directives").items()) d.directives[module_from_name(k)] = v.get<std::string>();
    return d;
}

std::optional<json> extract_json(std::string_view reply, std::string* why) {
    auto fail = [&](std::string reason) -> std::optional<json> {
        if (why) *why = std::move(reason);
        return std::nullopt;
    };
    std::string_view body;
    auto fence = reply.find("```");
    if (fence != std::string_view::npos) {
        auto line_end = reply.find('\n', fence);
        if (line_end == std::string_view::npos) return fail("unterminated code fence");
        auto info = text::trim(reply.substr(fence + 3, line_end - fence - 3));
        if (!info.empty() && !text::iequals(info, "json")) return fail("code fence is not json");
        auto close = reply.find("```", line_end + 1);
        if (close == std::string_view::npos) return fail("unterminated code fence");
        body = reply.substr(line_end + 1, close - line_end - 1);
    } else {
        body = text::trim(reply);
        if (body.empty() || body.front() != '{') return fail("no fenced json block");
    }
    try {
        auto j = json::parse(body);
        if (!j.is_object()) return fail("json body is not an object");
        return j;
    } catch (const json::parse_error& e) {
        return fail(std::string("invalid json: ") + e.what());
    }
}

}  // namespace minstrel::agents
