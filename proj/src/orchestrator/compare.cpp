#include "minstrel/orchestrator/compare.hpp"

#include "minstrel/agents/json.hpp"
#include "minstrel/agents/runners.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace minstrel::orchestrator {

using nlohmann::json;

std::string_view baseline_name(Baseline b) noexcept {
    switch (b) {
        case Baseline::InstructionOnly: return "instruction-only";
        case Baseline::Crispe: return "crispe";
        case Baseline::Costar: return "costar";
    }
    return "instruction-only";
}

Baseline parse_baseline(std::string_view name) {
    for (auto b : {Baseline::InstructionOnly, Baseline::Crispe, Baseline::Costar}) {
        if (text::iequals(name, baseline_name(b))) return b;
    }
    throw Error(ErrorCode::Validation, "unknown baseline '" + std::string(name) + "'");
}

std::string render_baseline(Baseline b, const agents::TaskBrief& brief) {
    const std::string task(text::trim(brief.task_text));
    const std::string domain = brief.domain_hint ? std::string(text::trim(*brief.domain_hint)) : "";
    switch (b) {
        case Baseline::InstructionOnly:
            return task + "\n";
        case Baseline::Crispe:
            return "Capacity and Role: You are an expert assistant" + (domain.empty() ? "" : " in " + domain) + ".\n" +
                   "Insight: " + (domain.empty() ? "The request comes from a general user." : "The domain is " + domain + ".") +
                   "\nStatement: " + task + "\n" +
                   "Personality: Respond in " + brief.language + " with a clear and helpful voice.\n" +
                   "Experiment: Give one complete answer; ask a clarifying question only when the request is ambiguous.\n";
        case Baseline::Costar:
            return "# CONTEXT #\n" + (domain.empty() ? std::string("General assistance.") : domain) + "\n\n" +
                   "# OBJECTIVE #\n" + task + "\n\n" +
                   "# STYLE #\nClear and concise.\n\n"
                   "# TONE #\nHelpful.\n\n"
                   "# AUDIENCE #\nThe user making the request.\n\n"
                   "# RESPONSE #\nPlain text in " + brief.language + ".\n";
    }
    return task + "\n";
}

ComparisonReport compare_prompts(const agents::TaskBrief& brief, const std::vector<Variant>& variants,
                                 const std::vector<std::string>& probes, const agents::AgentRegistry& registry,
                                 gateway::Gateway& gw, bool parallel) {
    agents::validate(brief);
    if (variants.size() < 2) throw Error(ErrorCode::Validation, "compare needs at least two variants");
    if (probes.empty()) throw Error(ErrorCode::Validation, "compare needs at least one probe");
    std::set<std::string> labels;
    for (const auto& v : variants) {
        if (v.label.empty() || !labels.insert(v.label).second) {
            throw Error(ErrorCode::Validation, "variant labels must be unique and non-empty");
        }
    }
    for (const auto& p : probes) {
        if (text::trim(p).empty()) throw Error(ErrorCode::Validation, "probes must not be blank");
    }

    ComparisonReport report{brief, probes, {}, {}};
    for (const auto& v : variants) {
        VariantResult r;
        r.label = v.label;
        r.system_prompt = std::holds_alternative<doc::PromptDocument>(v.source)
                              ? doc::render(std::get<doc::PromptDocument>(v.source))
                              : render_baseline(std::get<Baseline>(v.source), brief);
        try {
            const auto& endpoint = registry.simulator().endpoint_override.value_or(gw.defaults());
            std::vector<gateway::ChatMessage> dialogue{gateway::system_message(r.system_prompt)};
            for (const auto& p : probes) {
                dialogue.push_back(gateway::user_message(p));
                dialogue.push_back(gateway::assistant_message(gw.complete(endpoint, dialogue)));
                r.transcript.push_back(dialogue[dialogue.size() - 2]);
                r.transcript.push_back(dialogue.back());
            }
            auto round = agents::run_commentators(registry.commentators(), r.transcript, brief, gw, parallel);
            r.comments = round.final;
            double sum = 0;
            for (const auto& c : r.comments) sum += c.score.value_or(0);
            r.mean_score = sum / static_cast<double>(r.comments.size());
        } catch (const Error& e) {
            r.error = std::string(e.code_name()) + ": " + e.what();
        }
        report.variants.push_back(std::move(r));
    }

    std::vector<std::size_t> order(report.variants.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = report.variants[a];
        const auto& rb = report.variants[b];
        if (ra.mean_score.has_value() != rb.mean_score.has_value()) return ra.mean_score.has_value();
        return ra.mean_score.value_or(0) > rb.mean_score.value_or(0);
    });
    for (auto i : order) report.ranking.push_back(report.variants[i].label);
    return report;
}

json to_json(const ComparisonReport& r) {
    json variants = json::array();
    for (const auto& v : r.variants) {
        json transcript = json::array();
        for (const auto& m : v.transcript) transcript.push_back(gateway::to_json(m));
        json comments = json::array();
        for (const auto& c : v.comments) comments.push_back(agents::to_json(c));
        json item = {{"label", v.label},
                     {"system_prompt", v.system_prompt},
                     {"transcript", transcript},
                     {"comments", comments},
                     {"mean_score", v.mean_score ? json(*v.mean_score) : json(nullptr)}};
        if (v.error) item["error"] = *v.error;
        variants.push_back(std::move(item));
    }
    return {{"format", "minstrel-comparison"},
            {"version", 1},
            {"brief", agents::to_json(r.brief)},
            {"probes", r.probes},
            {"variants", variants},
            {"ranking", r.ranking}};
}

}  // namespace minstrel::orchestrator
