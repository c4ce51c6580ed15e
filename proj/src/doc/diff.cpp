#include "minstrel/doc/diff.hpp"

#include "minstrel/doc/grammar.hpp"

namespace minstrel::doc {

std::set<ModuleKind> diff(const PromptDocument& before, const PromptDocument& after) {
    std::set<ModuleKind> changed;
    for (const auto& b : before.blocks()) {
        const auto* other = after.find(b.kind);
        if (!other || render_block(b) != render_block(*other)) changed.insert(b.kind);
    }
    for (const auto& a : after.blocks()) {
        if (!before.has(a.kind)) changed.insert(a.kind);
    }
    return changed;
}

}  // namespace minstrel::doc
