#pragma once

#include "minstrel/doc/element.hpp"
#include "minstrel/doc/module_kind.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace minstrel::doc {

struct Subsection {
    std::string title;
    std::vector<Element> elements;
    int source_line = 0;

    bool operator==(const Subsection& o) const { return title == o.title && elements == o.elements; }
};

struct ModuleBlock {
    ModuleKind kind;
    /// Heading label after "Name:". For the Role block this is the role name.
    std::optional<std::string> title;
    std::vector<Element> elements;
    std::vector<Subsection> subsections;
    int source_line = 0;

    explicit ModuleBlock(ModuleKind k) : kind(std::move(k)) {}

    bool empty() const noexcept { return elements.empty() && subsections.empty(); }
    bool operator==(const ModuleBlock& o) const {
        return kind == o.kind && kind.name() == o.kind.name() && title == o.title && elements == o.elements &&
               subsections == o.subsections;
    }
};

/// A parsed structural prompt: exactly one Role block plus at most one block
/// per named kind (custom kinds unique by case-insensitive name).
class PromptDocument {
public:
    /// Throws MissingRole for a blank role name.
    explicit PromptDocument(std::string role_name);

    const std::string& role_name() const noexcept;
    void set_role_name(std::string name);

    /// Blocks in insertion (source) order; blocks()[0] is always the Role block.
    const std::vector<ModuleBlock>& blocks() const noexcept { return blocks_; }
    /// Blocks in canonical render order.
    std::vector<const ModuleBlock*> canonical_blocks() const;

    const ModuleBlock* find(const ModuleKind& kind) const;
    bool has(const ModuleKind& kind) const { return find(kind) != nullptr; }
    std::set<ModuleKind> kinds() const;

    /// Throws DuplicateModule when the kind is already present.
    ModuleBlock& add(ModuleBlock block);
    /// Inserts or replaces the block of the same kind (keeps its position).
    /// A Role block also updates role_name from its title.
    void put(ModuleBlock block);
    bool remove(const ModuleKind& kind);

    const std::optional<std::string>& source() const noexcept { return source_; }
    void set_source(std::string text) { source_ = std::move(text); }

    /// Structural equality: role, and blocks compared in canonical order.
    /// Ignores source text and line numbers.
    bool operator==(const PromptDocument& other) const;

private:
    std::vector<ModuleBlock> blocks_;
    std::optional<std::string> source_;
};

}  // namespace minstrel::doc
