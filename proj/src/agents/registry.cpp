#include "minstrel/agents/registry.hpp"

#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <fstream>
#include <sstream>

namespace minstrel::agents {

namespace {

doc::PromptDocument load_meta(const std::map<std::string, std::string>& texts, const std::string& stem) {
    auto it = texts.find(stem);
    const auto& builtin = builtin_agent_texts();
    const std::string& text = it != texts.end() ? it->second : builtin.at(stem);
    auto d = doc::parse(text);
    auto report = doc::lint(d);
    if (report.has_errors()) {
        throw Error(ErrorCode::LintErrors, "agent meta-prompt '" + stem + "' has lint errors");
    }
    return d;
}

void append(doc::PromptDocument& d, NamedModule kind, doc::Element e) {
    doc::ModuleBlock block(kind);
    if (const auto* existing = d.find(kind)) block = *existing;
    block.elements.push_back(std::move(e));
    d.put(std::move(block));
}

std::string_view stance_guidance(Stance s) {
    switch (s) {
        case Stance::Critical: return "Lean toward finding faults; praise only what clearly works.";
        case Stance::Favorable: return "Lean toward appreciating what works; still report real problems.";
        default: return "Weigh strengths and weaknesses evenly.";
    }
}

AgentSpec make(std::string id, AgentKind kind, std::optional<doc::PromptDocument> meta) {
    AgentSpec s{std::move(id), kind, std::move(meta), std::string(schema_for(kind.role())), std::nullopt};
    return s;
}

}  // namespace

AgentRegistry AgentRegistry::builtin() { return from_texts({}); }

AgentRegistry AgentRegistry::from_directory(const std::filesystem::path& dir) {
    std::map<std::string, std::string> texts;
    for (const auto& [stem, _] : builtin_agent_texts()) {
        auto p = dir / (stem + ".lgpt.md");
        if (!std::filesystem::exists(p)) continue;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        texts[stem] = ss.str();
    }
    return from_texts(texts);
}

AgentRegistry AgentRegistry::from_texts(const std::map<std::string, std::string>& texts) {
    AgentRegistry r(make("analyzer", AgentKind::analyzer(), load_meta(texts, "analyzer")),
                    make("reflector", AgentKind::reflector(), load_meta(texts, "reflector")),
                    make("simulator", AgentKind::simulator(), std::nullopt),
                    make("questioner", AgentKind::questioner(), load_meta(texts, "questioner")));

    const auto designer_base = load_meta(texts, "designer");
    for (auto m : doc::all_named_modules()) {
        auto meta = designer_base;
        std::string name(doc::module_name(m));
        meta.set_role_name(name + " Designer");
        append(meta, NamedModule::Background, doc::Element::assignment("assigned module", name));
        append(meta, NamedModule::Background, doc::Element::freeform(doc::module_purpose(m)));
        r.designers_.emplace(m, make("designer-" + text::slugify(name), AgentKind::designer(m), std::move(meta)));
    }

    const auto commentator_base = load_meta(texts, "commentator");
    const std::pair<std::string, Stance> roster[] = {{"critic-1", Stance::Critical},
                                                     {"critic-2", Stance::Critical},
                                                     {"supporter-1", Stance::Favorable},
                                                     {"supporter-2", Stance::Favorable},
                                                     {"neutral-1", Stance::Neutral}};
    for (const auto& [id, stance] : roster) {
        auto meta = commentator_base;
        append(meta, NamedModule::Style, doc::Element::assignment("stance", stance_name(stance)));
        append(meta, NamedModule::Style, doc::Element::freeform(stance_guidance(stance)));
        r.commentators_.push_back(make(id, AgentKind::commentator(stance), std::move(meta)));
    }
    return r;
}

const AgentSpec& AgentRegistry::designer(NamedModule target) const { return designers_.at(target); }

void AgentRegistry::set_endpoint_override(const std::string& selector, const gateway::EndpointConfig& config) {
    gateway::validate(config);
    auto role_of = [](const AgentSpec& s) {
        auto n = s.kind.name();
        return n.substr(0, n.find(':'));
    };
    auto apply = [&](AgentSpec& s) {
        if (s.id == selector || role_of(s) == selector) s.endpoint_override = config;
    };
    apply(analyzer_);
    apply(reflector_);
    apply(simulator_);
    apply(questioner_);
    for (auto& [_, s] : designers_) apply(s);
    for (auto& s : commentators_) apply(s);
}

std::vector<const AgentSpec*> AgentRegistry::all() const {
    std::vector<const AgentSpec*> out = {&analyzer_, &reflector_, &simulator_, &questioner_};
    for (const auto& [_, s] : designers_) out.push_back(&s);
    for (const auto& s : commentators_) out.push_back(&s);
    return out;
}

}  // namespace minstrel::agents
