#include "minstrel/doc/document.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <algorithm>

namespace minstrel::doc {

namespace {
std::string checked_role_name(std::string_view name) {
    auto t = text::trim(name);
    if (t.empty()) throw Error(ErrorCode::MissingRole, "role name is empty");
    if (t.find('\n') != std::string_view::npos) throw Error(ErrorCode::InvalidElement, "role name spans several lines");
    return std::string(t);
}
}  // namespace

PromptDocument::PromptDocument(std::string role_name) {
    ModuleBlock role(NamedModule::Role);
    role.title = checked_role_name(role_name);
    blocks_.push_back(std::move(role));
}

const std::string& PromptDocument::role_name() const noexcept { return *blocks_.front().title; }

void PromptDocument::set_role_name(std::string name) { blocks_.front().title = checked_role_name(name); }

std::vector<const ModuleBlock*> PromptDocument::canonical_blocks() const {
    std::vector<const ModuleBlock*> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(&b);
    std::stable_sort(out.begin(), out.end(),
                     [](const ModuleBlock* a, const ModuleBlock* b) { return a->kind.rank() < b->kind.rank(); });
    return out;
}

const ModuleBlock* PromptDocument::find(const ModuleKind& kind) const {
    auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const ModuleBlock& b) { return b.kind == kind; });
    return it == blocks_.end() ? nullptr : &*it;
}

std::set<ModuleKind> PromptDocument::kinds() const {
    std::set<ModuleKind> out;
    for (const auto& b : blocks_) out.insert(b.kind);
    return out;
}

ModuleBlock& PromptDocument::add(ModuleBlock block) {
    if (has(block.kind)) {
        throw Error(ErrorCode::DuplicateModule, "duplicate module '" + block.kind.name() + "'", block.source_line);
    }
    blocks_.push_back(std::move(block));
    return blocks_.back();
}

void PromptDocument::put(ModuleBlock block) {
    if (block.kind == ModuleKind(NamedModule::Role)) block.title = checked_role_name(block.title.value_or(""));
    auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const ModuleBlock& b) { return b.kind == block.kind; });
    if (it == blocks_.end()) {
        blocks_.push_back(std::move(block));
    } else {
        *it = std::move(block);
    }
}

bool PromptDocument::remove(const ModuleKind& kind) {
    if (kind == ModuleKind(NamedModule::Role)) return false;
    auto it = std::find_if(blocks_.begin(), blocks_.end(), [&](const ModuleBlock& b) { return b.kind == kind; });
    if (it == blocks_.end()) return false;
    blocks_.erase(it);
    return true;
}

bool PromptDocument::operator==(const PromptDocument& other) const {
    auto a = canonical_blocks();
    auto b = other.canonical_blocks();
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const ModuleBlock* x, const ModuleBlock* y) { return *x == *y; });
}

}  // namespace minstrel::doc
