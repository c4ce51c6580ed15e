#pragma once

#include "minstrel/doc/document.hpp"

#include <set>

namespace minstrel::doc {

/// Kinds whose canonical block rendering differs between the two documents,
/// including kinds present in only one of them.
std::set<ModuleKind> diff(const PromptDocument& before, const PromptDocument& after);

}  // namespace minstrel::doc
