#pragma once

// Random PromptDocument generator for property tests.

#include "minstrel/doc/document.hpp"

#include <random>
#include <string>
#include <vector>

namespace minstrel::testing {

inline const std::vector<std::string>& word_pool() {
    static const std::vector<std::string> words = {
        "title", "article", "report", "answer", "user",  "plan",   "summary", "style", "data",
        "short", "formal",  "clear",  "three",  "steps", "review", "list",    "goal",  "table",
        "café",  "⟨INPUT⟩", "20",     "words",  "tone",  "draft",  "keep",    "avoid", "each"};
    return words;
}

inline std::string random_phrase(std::mt19937& rng, int min_words = 1, int max_words = 6) {
    const auto& pool = word_pool();
    std::uniform_int_distribution<int> n(min_words, max_words);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::string out;
    int count = n(rng);
    for (int i = 0; i < count; ++i) {
        if (i) out.push_back(' ');
        out += pool[pick(rng)];
    }
    return out;
}

inline doc::Element random_element(std::mt19937& rng) {
    std::uniform_int_distribution<int> variant(0, 2);
    switch (variant(rng)) {
        case 0:
            return doc::Element::assignment(random_phrase(rng, 1, 3), random_phrase(rng));
        case 1: {
            std::uniform_int_distribution<int> steps(1, 5);
            std::vector<std::string> actions;
            int n = steps(rng);
            for (int i = 0; i < n; ++i) actions.push_back(random_phrase(rng, 2, 7));
            std::optional<std::string> result;
            if (rng() % 2) result = random_phrase(rng, 1, 3);
            return doc::Element::action(random_phrase(rng, 1, 2), random_phrase(rng, 1, 2), actions, result);
        }
        default:
            return doc::Element::freeform("Please " + random_phrase(rng, 1, 8));
    }
}

inline std::vector<doc::Element> random_elements(std::mt19937& rng, int min_n, int max_n) {
    std::uniform_int_distribution<int> n(min_n, max_n);
    std::vector<doc::Element> out;
    int count = n(rng);
    for (int i = 0; i < count; ++i) out.push_back(random_element(rng));
    return out;
}

inline doc::ModuleBlock random_block(std::mt19937& rng, const doc::ModuleKind& kind) {
    doc::ModuleBlock block(kind);
    if (kind == doc::ModuleKind(doc::NamedModule::Role)) return block;
    block.elements = random_elements(rng, 0, 3);
    if (doc::allows_subsections(kind) && rng() % 2) {
        std::uniform_int_distribution<int> n(1, 2);
        int subs = n(rng);
        for (int i = 0; i < subs; ++i) {
            block.subsections.push_back(doc::Subsection{random_phrase(rng, 1, 4), random_elements(rng, 1, 3), 0});
        }
    }
    if (block.empty()) block.elements.push_back(random_element(rng));
    if (kind == doc::ModuleKind(doc::NamedModule::Workflow) && rng() % 3 == 0) block.title = random_phrase(rng, 1, 3);
    return block;
}

/// Valid document with a random subset of named kinds (in shuffled insertion
/// order) and up to two custom kinds.
inline doc::PromptDocument random_document(std::mt19937& rng) {
    doc::PromptDocument d("Agent " + random_phrase(rng, 1, 2));
    std::vector<doc::ModuleKind> kinds;
    for (auto m : doc::all_named_modules()) {
        if (m != doc::NamedModule::Role && rng() % 2) kinds.emplace_back(m);
    }
    static const std::vector<std::string> custom_names = {"Notes", "World Rules", "Escalation", "Glossary"};
    std::uniform_int_distribution<int> ncustom(0, 2);
    int nc = ncustom(rng);
    for (int i = 0; i < nc; ++i) kinds.push_back(doc::ModuleKind::custom(custom_names[static_cast<std::size_t>(i)]));
    std::shuffle(kinds.begin(), kinds.end(), rng);
    for (const auto& k : kinds) d.add(random_block(rng, k));
    if (rng() % 3 == 0) {
        doc::ModuleBlock role(doc::NamedModule::Role);
        role.title = d.role_name();
        role.elements = random_elements(rng, 1, 2);
        d.put(std::move(role));
    }
    return d;
}

}  // namespace minstrel::testing
