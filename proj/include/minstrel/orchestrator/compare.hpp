#pragma once

#include "minstrel/agents/registry.hpp"
#include "minstrel/gateway/gateway.hpp"

#include <nlohmann/json.hpp>

#include <variant>

namespace minstrel::orchestrator {

/// Prompt frameworks a TaskBrief can be mechanically rendered into.
enum class Baseline { InstructionOnly, Crispe, Costar };

std::string_view baseline_name(Baseline b) noexcept;
/// "instruction-only", "crispe", "costar" (case-insensitive). Error(Validation) otherwise.
Baseline parse_baseline(std::string_view name);
/// Fixed slot mapping from the brief; see docs/baselines.md.
std::string render_baseline(Baseline b, const agents::TaskBrief& brief);

struct Variant {
    std::string label;
    std::variant<doc::PromptDocument, Baseline> source;
};

struct VariantResult {
    std::string label;
    std::string system_prompt;
    std::vector<gateway::ChatMessage> transcript;
    /// Final-round commentator comments.
    std::vector<agents::Comment> comments;
    std::optional<double> mean_score;
    /// "<ErrorCode>: <message>" when the variant could not complete.
    std::optional<std::string> error;
};

struct ComparisonReport {
    agents::TaskBrief brief;
    std::vector<std::string> probes;
    /// In input order.
    std::vector<VariantResult> variants;
    /// Labels by mean score, best first; ties keep input order; failed variants last.
    std::vector<std::string> ranking;
};

/// Every variant answers the same probes as one multi-turn dialogue, then
/// the commentator panel scores it. A variant's gateway or agent error is
/// recorded on that variant and the others still run.
/// Errors: Validation (fewer than two variants, duplicate labels, no probes).
ComparisonReport compare_prompts(const agents::TaskBrief& brief, const std::vector<Variant>& variants,
                                 const std::vector<std::string>& probes, const agents::AgentRegistry& registry,
                                 gateway::Gateway& gw, bool parallel = true);

nlohmann::json to_json(const ComparisonReport& r);

}  // namespace minstrel::orchestrator
