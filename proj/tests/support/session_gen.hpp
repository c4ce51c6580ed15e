#pragma once

#include "minstrel/agents/runners.hpp"
#include "minstrel/doc/module_kind.hpp"
#include "support/replies.hpp"

#include <random>
#include <set>

/// Random session plans and the fixture packs that script them.
namespace minstrel::testing {

struct SessionPlan {
    std::set<doc::NamedModule> activated;  // includes Role and Goals
    int test_turns = 1;
    int max_reflections = 0;
    /// Reflector keys per reflection pass; an empty set converges.
    std::vector<std::set<doc::NamedModule>> directives;

    /// Test passes the orchestrator will run for this plan.
    int passes() const {
        for (int i = 0;; ++i) {
            if (i >= static_cast<int>(directives.size()) || directives[i].empty() || i == max_reflections) return i + 1;
        }
    }
    bool revises_after(int pass) const { return pass + 1 < passes(); }

    /// Independent oracle for the bounded-work formula.
    std::size_t expected_calls() const {
        std::size_t n = 1 + activated.size();
        for (int p = 0; p < passes(); ++p) {
            n += 2 * static_cast<std::size_t>(test_turns) + 10 + 1;
            if (revises_after(p)) n += directives[p].size();
        }
        return n;
    }
};

inline std::string block_text(doc::NamedModule m, int revision) {
    if (m == doc::NamedModule::Role) return revision == 0 ? "# Role: Plan Tester" : "# Role: Plan Tester " + std::to_string(revision);
    return "## " + std::string(doc::module_name(m)) + "\n- " + std::string(doc::module_name(m)) + " content, revision " +
           std::to_string(revision) + ".";
}

inline std::vector<gateway::Fixture> fixtures_for(const SessionPlan& plan) {
    using replies::on;
    std::vector<gateway::Fixture> fx;
    std::vector<std::string> names;
    for (auto m : plan.activated) names.emplace_back(doc::module_name(m));
    fx.push_back(on(agents::tag::analyzer(), replies::analyzer(names)));
    for (auto m : plan.activated) {
        fx.push_back(on(agents::tag::designer(m, false),
                        replies::designer(std::string(doc::module_name(m)), block_text(m, 0))));
    }
    auto present = plan.activated;
    const char* ids[] = {"critic-1", "critic-2", "supporter-1", "supporter-2", "neutral-1"};
    for (int p = 0; p < plan.passes(); ++p) {
        for (int t = 1; t <= plan.test_turns; ++t) {
            fx.push_back(on(agents::tag::questioner(t), "question " + std::to_string(p) + "." + std::to_string(t)));
            fx.push_back(replies::next("answer " + std::to_string(p) + "." + std::to_string(t)));
        }
        std::set<doc::NamedModule> keys = p < static_cast<int>(plan.directives.size()) ? plan.directives[p]
                                                                                        : std::set<doc::NamedModule>{};
        for (std::size_t c = 0; c < 5; ++c) {
            std::vector<replies::IssueSpec> issues;
            if (c == 0) {
                for (auto k : keys) issues.push_back({std::string(doc::module_name(k)), "needs work"});
            }
            for (int round = 1; round <= 2; ++round) {
                fx.push_back(on(agents::tag::commentator(ids[c], round), replies::comment(3 + c + round, issues)));
            }
        }
        std::map<std::string, std::string> directives;
        for (auto k : keys) directives[std::string(doc::module_name(k))] = "revise after pass " + std::to_string(p);
        fx.push_back(on(agents::tag::reflector(), replies::reflector(directives)));
        if (plan.revises_after(p)) {
            for (auto k : keys) {
                bool exists = present.contains(k);
                fx.push_back(on(agents::tag::designer(k, exists),
                                replies::designer(std::string(doc::module_name(k)), block_text(k, p + 1))));
                present.insert(k);
            }
        }
    }
    return fx;
}

inline SessionPlan random_plan(std::mt19937& rng) {
    const auto mods = doc::all_named_modules();
    SessionPlan plan;
    plan.activated = {doc::NamedModule::Role, doc::NamedModule::Goals};
    for (auto m : mods) {
        if (rng() % 3 == 0) plan.activated.insert(m);
    }
    plan.test_turns = 1 + static_cast<int>(rng() % 3);
    plan.max_reflections = static_cast<int>(rng() % 4);
    int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
        std::set<doc::NamedModule> keys;
        int k = static_cast<int>(rng() % 4);
        for (int j = 0; j < k; ++j) {
            // Mostly activated modules, sometimes a new one.
            if (rng() % 4 == 0) {
                keys.insert(mods[rng() % mods.size()]);
            } else {
                auto it = plan.activated.begin();
                std::advance(it, rng() % plan.activated.size());
                keys.insert(*it);
            }
        }
        plan.directives.push_back(keys);
    }
    return plan;
}

}  // namespace minstrel::testing
