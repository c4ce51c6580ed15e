#include "minstrel/agents/runners.hpp"

#include "minstrel/agents/json.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <algorithm>
#include <future>
#include <sstream>

namespace minstrel::agents {

using gateway::ChatMessage;
using nlohmann::json;

namespace tag {
std::string analyzer() { return "[minstrel:analyzer]"; }
std::string designer(NamedModule target, bool revise) {
    return "[minstrel:designer:" + std::string(doc::module_name(target)) + (revise ? ":revise]" : ":design]");
}
std::string questioner(int turn) { return "[minstrel:questioner:turn=" + std::to_string(turn) + "]"; }
std::string commentator(const std::string& agent_id, int round) {
    return "[minstrel:commentator:" + agent_id + ":round=" + std::to_string(round) + "]";
}
std::string reflector() { return "[minstrel:reflector]"; }
}  // namespace tag

namespace {

/// Reply did not match the output schema; eligible for one repair turn.
struct SchemaFailure {
    std::string why;
};

std::string excerpt(std::string_view s) {
    if (s.size() <= 300) return std::string(s);
    return std::string(s.substr(0, 300)) + "...";
}

void require_role(const AgentSpec& spec, AgentRole role, std::string_view what) {
    if (spec.kind.role() != role) {
        throw Error(ErrorCode::PreconditionViolation,
                    "agent '" + spec.id + "' (" + spec.kind.name() + ") is not " + std::string(what));
    }
}

const gateway::EndpointConfig& endpoint(const AgentSpec& spec, gateway::Gateway& gw) {
    return spec.endpoint_override ? *spec.endpoint_override : gw.defaults();
}

std::string system_text(const AgentSpec& spec) {
    if (!spec.meta_prompt) throw Error(ErrorCode::PreconditionViolation, "agent '" + spec.id + "' has no meta-prompt");
    return doc::render(*spec.meta_prompt);
}

std::string format_brief(const TaskBrief& b) {
    std::string out = "Task: " + b.task_text + "\n";
    if (b.domain_hint) out += "Domain: " + *b.domain_hint + "\n";
    out += "Language: " + b.language + "\n";
    return out;
}

std::string format_transcript(const std::vector<ChatMessage>& transcript) {
    std::string out;
    for (const auto& m : transcript) {
        out += m.role == gateway::ChatRole::User ? "User: " : "Assistant: ";
        out += m.content;
        out += "\n";
    }
    return out;
}

std::string format_comment(const Comment& c) {
    std::string out = "- " + c.author + " (" + std::string(stance_name(c.stance));
    if (c.score) out += ", score " + std::to_string(*c.score);
    out += ")";
    if (c.issues.empty()) out += ": no issues";
    out += "\n";
    for (const auto& i : c.issues) {
        out += "  - ";
        if (i.module_hint) out += "[" + std::string(doc::module_name(*i.module_hint)) + "] ";
        out += i.text + "\n";
    }
    return out;
}

json require_json(std::string_view reply, std::initializer_list<std::string_view> allowed) {
    std::string why;
    auto j = extract_json(reply, &why);
    if (!j) throw SchemaFailure{why};
    for (const auto& [key, _] : j->items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw SchemaFailure{"unexpected key '" + key + "'"};
        }
    }
    return *j;
}

template <typename Parse>
auto call_structured(const AgentSpec& spec, std::vector<ChatMessage> messages, const std::string& request_tag,
                     gateway::Gateway& gw, Parse parse) {
    const auto& cfg = endpoint(spec, gw);
    auto reply = gw.complete(cfg, messages);
    try {
        return parse(reply);
    } catch (const SchemaFailure& first) {
        messages.push_back(gateway::assistant_message(reply));
        messages.push_back(gateway::user_message(request_tag + "\nYour last output failed validation: " + first.why +
                                                 ". Re-emit only valid JSON."));
        auto second = gw.complete(cfg, messages);
        try {
            return parse(second);
        } catch (const SchemaFailure& again) {
            throw Error(ErrorCode::SchemaViolation,
                        spec.id + ": " + again.why + "; raw output: " + excerpt(second));
        }
    }
}

std::string module_list() {
    std::string out;
    for (auto m : doc::all_named_modules()) {
        if (!out.empty()) out += ", ";
        out += doc::module_name(m);
    }
    return out;
}

Comment parse_comment(std::string_view reply, const AgentSpec& spec) {
    // A "stance" key is tolerated and ignored: stance always comes from the agent definition.
    auto j = require_json(reply, {"score", "issues", "stance"});
    if (!j.contains("score") || !j["score"].is_number_integer()) throw SchemaFailure{"'score' must be an integer"};
    int score = j["score"].get<int>();
    if (score < 1 || score > 10) throw SchemaFailure{"'score' must be within 1..10"};
    Comment c;
    c.author = spec.id;
    c.stance = spec.kind.stance();
    c.score = score;
    if (j.contains("issues")) {
        if (!j["issues"].is_array()) throw SchemaFailure{"'issues' must be an array"};
        for (const auto& i : j["issues"]) {
            if (!i.is_object() || !i.contains("text") || !i["text"].is_string() ||
                text::trim(i["text"].get<std::string>()).empty()) {
                throw SchemaFailure{"each issue needs a non-empty string 'text'"};
            }
            Issue issue{std::nullopt, i["text"].get<std::string>()};
            if (i.contains("module") && i["module"].is_string()) {
                issue.module_hint = doc::lookup_named_module(i["module"].get<std::string>());
            }
            c.issues.push_back(std::move(issue));
        }
    }
    return c;
}

template <typename Fn>
std::vector<Comment> run_each(std::size_t n, bool parallel, Fn fn) {
    std::vector<Comment> out;
    if (!parallel) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
        return out;
    }
    std::vector<std::future<Comment>> futures;
    for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
    for (auto& f : futures) f.wait();
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace

ActivationState run_analyzer(const AgentSpec& spec, const TaskBrief& brief, gateway::Gateway& gw) {
    require_role(spec, AgentRole::Analyzer, "the analyzer");
    validate(brief);
    const auto request_tag = tag::analyzer();
    std::string user = request_tag + "\n" + format_brief(brief) +
                       "\nDecide which prompt modules to activate for this task.\n"
                       "Available modules: " + module_list() +
                       "\nReply with a fenced json block: {\"activated\": [module names], \"rationale\": "
                       "{module name: reason}}\n";
    auto state = call_structured(
        spec, {gateway::system_message(system_text(spec)), gateway::user_message(user)}, request_tag, gw,
        [](std::string_view reply) {
            auto j = require_json(reply, {"activated", "rationale"});
            if (!j.contains("activated") || !j["activated"].is_array()) throw SchemaFailure{"'activated' must be an array"};
            ActivationState s;
            for (const auto& name : j["activated"]) {
                if (!name.is_string()) throw SchemaFailure{"'activated' entries must be strings"};
                s.activated.insert(module_from_name(name.get<std::string>()));
            }
            if (j.contains("rationale")) {
                if (!j["rationale"].is_object()) throw SchemaFailure{"'rationale' must be an object"};
                for (const auto& [key, why] : j["rationale"].items()) {
                    if (!why.is_string()) throw SchemaFailure{"rationale values must be strings"};
                    s.rationale[module_from_name(key)] = why.get<std::string>();
                }
            }
            return s;
        });
    state.activated.insert(NamedModule::Role);
    state.activated.insert(NamedModule::Goals);
    std::erase_if(state.rationale, [&](const auto& kv) { return !state.activated.contains(kv.first); });
    return state;
}

doc::ModuleBlock run_designer(const AgentSpec& spec, const TaskBrief& brief, const doc::ModuleBlock* existing,
                              const std::optional<std::string>& directive, gateway::Gateway& gw) {
    require_role(spec, AgentRole::Designer, "a designer");
    validate(brief);
    const NamedModule target = spec.kind.target();
    const std::string name(doc::module_name(target));
    if (existing && !(existing->kind == doc::ModuleKind(target))) {
        throw Error(ErrorCode::PreconditionViolation, "existing block is '" + existing->kind.name() +
                                                          "', designer writes '" + name + "'");
    }
    const bool revise = existing && directive;
    const auto request_tag = tag::designer(target, revise);

    std::string user = request_tag + "\n" + format_brief(brief);
    if (revise) {
        user += "\nRevise the " + name + " module.\nCurrent module:\n" + doc::render_block(*existing) +
                "\nRevision directive: " + *directive + "\n";
    } else {
        user += "\nWrite the " + name + " module.\n";
        if (directive) user += "Revision directive: " + *directive + "\n";
    }
    std::string heading = target == NamedModule::Role ? "# Role: <name>" : "## " + name;
    user += "Reply with a fenced json block: {\"module\": \"" + name + "\", \"block\": \"" + heading +
            "\\n- ...\"}\n";

    return call_structured(
        spec, {gateway::system_message(system_text(spec)), gateway::user_message(user)}, request_tag, gw,
        [&](std::string_view reply) {
            auto j = require_json(reply, {"module", "block"});
            if (!j.contains("module") || !j["module"].is_string()) throw SchemaFailure{"'module' must be a string"};
            if (!j.contains("block") || !j["block"].is_string()) throw SchemaFailure{"'block' must be a string"};
            auto claimed = module_from_name(j["module"].get<std::string>());
            if (claimed != target) {
                throw Error(ErrorCode::WrongModuleKind,
                            spec.id + " returned module '" + std::string(doc::module_name(claimed)) + "'");
            }
            std::optional<doc::ModuleBlock> block;
            try {
                block = doc::parse_block(j["block"].get<std::string>());
            } catch (const Error& e) {
                throw SchemaFailure{std::string("'block' does not parse: ") + e.what()};
            }
            if (!(block->kind == doc::ModuleKind(target))) {
                throw Error(ErrorCode::WrongModuleKind, spec.id + " returned a '" + block->kind.name() + "' block");
            }
            if (target != NamedModule::Role && block->empty()) throw SchemaFailure{"'block' has no elements"};
            block->source_line = 0;
            return *block;
        });
}

std::vector<ChatMessage> run_simulator_dialogue(const AgentSpec& simulator, const AgentSpec& questioner,
                                                const doc::PromptDocument& prompt, const TaskBrief& brief, int turns,
                                                gateway::Gateway& gw) {
    require_role(simulator, AgentRole::Simulator, "the simulator");
    require_role(questioner, AgentRole::Questioner, "the questioner");
    validate(brief);
    if (turns < 1) throw Error(ErrorCode::PreconditionViolation, "test dialogue needs at least one turn");
    if (doc::lint(prompt).has_errors()) {
        throw Error(ErrorCode::PreconditionViolation, "prompt under test has lint errors");
    }
    const auto system_prompt = doc::render(prompt);
    const auto questioner_system = system_text(questioner);

    std::vector<ChatMessage> transcript;
    for (int turn = 1; turn <= turns; ++turn) {
        try {
            std::string ask = tag::questioner(turn) + "\n" + format_brief(brief) + "Assistant under test: " +
                              prompt.role_name() + "\n";
            if (!transcript.empty()) ask += "\nConversation so far:\n" + format_transcript(transcript);
            ask += "\nWrite the next user message.\n";
            auto question = gw.complete(endpoint(questioner, gw),
                                        {gateway::system_message(questioner_system), gateway::user_message(ask)});
            transcript.push_back(gateway::user_message(question));

            std::vector<ChatMessage> dialogue{gateway::system_message(system_prompt)};
            dialogue.insert(dialogue.end(), transcript.begin(), transcript.end());
            auto answer = gw.complete(endpoint(simulator, gw), dialogue);
            transcript.push_back(gateway::assistant_message(answer));
        } catch (const Error& e) {
            throw Error(e.code(), "test dialogue turn " + std::to_string(turn) + ": " + e.what());
        }
    }
    return transcript;
}

CommentatorRound run_commentators(std::span<const AgentSpec> specs, const std::vector<ChatMessage>& transcript,
                                  const TaskBrief& brief, gateway::Gateway& gw, bool parallel) {
    for (const auto& s : specs) require_role(s, AgentRole::Commentator, "a commentator");
    std::vector<Stance> stances;
    for (const auto& s : specs) stances.push_back(s.kind.stance());
    std::sort(stances.begin(), stances.end());
    const std::vector<Stance> expected = {Stance::Critical, Stance::Critical, Stance::Favorable, Stance::Favorable,
                                          Stance::Neutral};
    if (stances != expected) {
        throw Error(ErrorCode::StanceMultisetViolation,
                    "commentators must be 2 critical, 2 favorable and 1 neutral; got " + std::to_string(specs.size()) +
                        " agents");
    }
    validate(brief);
    const std::string context = format_brief(brief) + "\nTest conversation:\n" + format_transcript(transcript);
    const std::string schema_hint =
        "Reply with a fenced json block: {\"score\": 1-10, \"issues\": [{\"module\": module name or null, "
        "\"text\": \"...\"}]}\n";

    CommentatorRound out;
    out.first_round = run_each(specs.size(), parallel, [&](std::size_t i) {
        const auto& spec = specs[i];
        auto request_tag = tag::commentator(spec.id, 1);
        std::string user = request_tag + "\n" + context +
                           "\nEvaluate how well the assistant handled this conversation.\n" + schema_hint;
        return call_structured(spec, {gateway::system_message(system_text(spec)), gateway::user_message(user)},
                               request_tag, gw, [&](std::string_view reply) { return parse_comment(reply, spec); });
    });

    std::string panel;
    for (const auto& c : out.first_round) panel += format_comment(c);
    out.final = run_each(specs.size(), parallel, [&](std::size_t i) {
        const auto& spec = specs[i];
        auto request_tag = tag::commentator(spec.id, 2);
        std::string user = request_tag + "\n" + context + "\nYour first-round evaluation:\n" +
                           format_comment(out.first_round[i]) + "\nAll first-round evaluations:\n" + panel +
                           "\nDebate: reconsider your evaluation in light of the others and give your final one.\n" +
                           schema_hint;
        return call_structured(spec, {gateway::system_message(system_text(spec)), gateway::user_message(user)},
                               request_tag, gw, [&](std::string_view reply) { return parse_comment(reply, spec); });
    });
    return out;
}

ReflectionDirectives run_reflector(const AgentSpec& spec, const std::vector<Comment>& comments, gateway::Gateway& gw,
                                   const TaskBrief* brief) {
    require_role(spec, AgentRole::Reflector, "the reflector");
    if (comments.empty()) return {};

    std::set<NamedModule> mentioned;
    std::string listing;
    for (const auto& c : comments) {
        listing += format_comment(c);
        for (const auto& i : c.issues) {
            if (i.module_hint) mentioned.insert(*i.module_hint);
            auto named = mentioned_modules(i.text);
            mentioned.insert(named.begin(), named.end());
        }
    }
    const auto request_tag = tag::reflector();
    std::string user = request_tag + "\n" + (brief ? format_brief(*brief) + "\n" : std::string()) +
                       "Comments from the test group and the user:\n" + listing +
                       "\nDecide which modules must be revised and give one instruction per module.\n"
                       "Reply with a fenced json block: {\"directives\": {module name: instruction}}\n";
    auto result = call_structured(
        spec, {gateway::system_message(system_text(spec)), gateway::user_message(user)}, request_tag, gw,
        [](std::string_view reply) {
            auto j = require_json(reply, {"directives"});
            if (!j.contains("directives") || !j["directives"].is_object()) {
                throw SchemaFailure{"'directives' must be an object"};
            }
            ReflectionDirectives d;
            for (const auto& [key, instruction] : j["directives"].items()) {
                if (!instruction.is_string() || text::trim(instruction.get<std::string>()).empty()) {
                    throw SchemaFailure{"directive for '" + key + "' must be a non-empty string"};
                }
                d.directives[module_from_name(key)] = instruction.get<std::string>();
            }
            return d;
        });
    std::erase_if(result.directives, [&](const auto& kv) { return !mentioned.contains(kv.first); });
    return result;
}

}  // namespace minstrel::agents
