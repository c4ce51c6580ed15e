#include "minstrel/doc/grammar.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

#include <cctype>

namespace minstrel::doc {

namespace {

constexpr std::string_view kReturnPrefix = "Return the ";

std::string normalize_newlines(std::string_view in) {
    if (in.size() >= 3 && in.substr(0, 3) == "\xEF\xBB\xBF") in.remove_prefix(3);
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
        } else {
            out.push_back(in[i]);
        }
    }
    return out;
}

[[noreturn]] void malformed(int line, const std::string& why) {
    throw Error(ErrorCode::MalformedHeading, "line " + std::to_string(line) + ": " + why, line);
}

struct Heading {
    int level = 0;
    std::string_view payload;
};

Heading split_heading(std::string_view line, int lineno) {
    Heading h;
    while (static_cast<std::size_t>(h.level) < line.size() && line[h.level] == '#') ++h.level;
    auto rest = line.substr(h.level);
    if (rest.empty() || (rest.front() != ' ' && rest.front() != '\t')) malformed(lineno, "heading marker must be followed by a space");
    h.payload = text::trim(rest);
    if (h.payload.empty()) malformed(lineno, "heading has no text");
    if (h.level > 3) malformed(lineno, "heading level deeper than ###");
    return h;
}

// "1. step" / "12) step" with the leading indentation already checked.
std::optional<std::string_view> numbered_step(std::string_view t) {
    std::size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0 || i + 1 >= t.size() || (t[i] != '.' && t[i] != ')') || t[i + 1] != ' ') return std::nullopt;
    auto step = text::trim(t.substr(i + 2));
    if (step.empty()) return std::nullopt;
    return step;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(normalize_newlines(text)) {}

    PromptDocument run() {
        auto lines = text::split_lines(text_);
        int first_content = 0;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            int lineno = static_cast<int>(i) + 1;
            auto line = lines[i];
            if (text::trim(line).empty()) continue;
            if (line.front() == '#') {
                auto h = split_heading(line, lineno);
                if (h.level == 1) {
                    open_role(h.payload, lineno, first_content);
                    continue;
                }
                if (blocks_.empty()) {
                    if (!first_content) first_content = lineno;
                    continue;
                }
                if (h.level == 2) open_block(h.payload, lineno);
                else open_subsection(h.payload, lineno);
                continue;
            }
            if (blocks_.empty()) {
                if (!first_content) first_content = lineno;
                continue;
            }
            element_line(line, lineno);
        }
        if (blocks_.empty()) throw Error(ErrorCode::MissingRole, "no '# Role: <name>' heading");

        PromptDocument doc(*blocks_.front().title);
        for (auto& b : blocks_) {
            if (b.kind == ModuleKind(NamedModule::Role)) doc.put(std::move(b));
            else doc.add(std::move(b));
        }
        doc.set_source(text_);
        return doc;
    }

private:
    void open_role(std::string_view payload, int lineno, int first_content) {
        if (!blocks_.empty()) {
            throw Error(ErrorCode::DuplicateModule, "line " + std::to_string(lineno) + ": duplicate Role heading",
                        lineno);
        }
        if (first_content) malformed(first_content, "content before the Role heading");
        auto colon = payload.find(':');
        if (colon == std::string_view::npos || !text::iequals(text::trim(payload.substr(0, colon)), "role")) {
            malformed(lineno, "level-1 heading must read '# Role: <name>'");
        }
        auto name = text::trim(payload.substr(colon + 1));
        if (name.empty()) malformed(lineno, "Role heading has no name");
        ModuleBlock role(NamedModule::Role);
        role.title = std::string(name);
        role.source_line = lineno;
        blocks_.push_back(std::move(role));
        subsection_ = -1;
        reset_element();
    }

    std::vector<Element>& current_elements() {
        auto& b = blocks_.back();
        return subsection_ < 0 ? b.elements : b.subsections[static_cast<std::size_t>(subsection_)].elements;
    }

    void reset_element() {
        action_open_ = false;
        result_seen_ = false;
    }

    void open_block(std::string_view payload, int lineno) {
        auto colon = payload.find(':');
        auto name = text::trim(payload.substr(0, colon));
        std::optional<std::string> title;
        if (colon != std::string_view::npos) {
            auto t = text::trim(payload.substr(colon + 1));
            if (t.empty()) malformed(lineno, "empty title after ':'");
            title = std::string(t);
        }
        if (name.empty()) malformed(lineno, "module heading has no name");
        if (name.find('#') != std::string_view::npos) malformed(lineno, "module name contains '#'");
        auto kind = module_from_heading(name);
        if (kind == ModuleKind(NamedModule::Role)) malformed(lineno, "Role must be a level-1 heading");
        for (const auto& b : blocks_) {
            if (b.kind == kind) {
                throw Error(ErrorCode::DuplicateModule,
                            "line " + std::to_string(lineno) + ": duplicate module '" + kind.name() + "'", lineno);
            }
        }
        ModuleBlock block(std::move(kind));
        block.title = std::move(title);
        block.source_line = lineno;
        blocks_.push_back(std::move(block));
        subsection_ = -1;
        reset_element();
    }

    void open_subsection(std::string_view payload, int lineno) {
        auto& b = blocks_.back();
        b.subsections.push_back(Subsection{std::string(payload), {}, lineno});
        subsection_ = static_cast<int>(b.subsections.size()) - 1;
        reset_element();
    }

    void element_line(std::string_view line, int lineno) {
        bool indented = line.front() == ' ' || line.front() == '\t';
        auto t = text::trim(line);
        if (t.front() == '#') malformed(lineno, "indented heading marker");
        auto& elements = current_elements();

        if (indented && action_open_ && !result_seen_) {
            if (auto step = numbered_step(t)) {
                append_step(elements, *step);
                return;
            }
            if (text::istarts_with(t, kReturnPrefix) && elements.back().as<Action>()) {
                auto r = t.substr(kReturnPrefix.size());
                if (!r.empty() && r.back() == '.') r.remove_suffix(1);
                r = text::trim(r);
                if (!r.empty()) {
                    auto act = *elements.back().as<Action>();
                    act.result = std::string(r);
                    replace_last(elements, act);
                    result_seen_ = true;
                    return;
                }
            }
        }

        std::string_view body = t;
        if (body.size() >= 2 && body[0] == '-' && (body[1] == ' ' || body[1] == '\t')) {
            body = text::trim(body.substr(2));
        } else if (body == "-") {
            body = {};
        }
        reset_element();
        if (body.empty()) return;
        if (body.front() == '#') malformed(lineno, "element text starts with a heading marker");
        auto e = Element::classify(body, lineno);
        if (e.as<Freeform>() && match_action_opener(body)) action_open_ = true;
        if (e.as<Action>()) action_open_ = true;
        elements.push_back(std::move(e));
    }

    static void append_step(std::vector<Element>& elements, std::string_view step) {
        Action act;
        if (auto existing = elements.back().as<Action>()) {
            act = *existing;
        } else {
            auto opener = match_action_opener(elements.back().as<Freeform>()->text);
            act.input_property = opener->property;
            act.input_value = opener->value;
        }
        act.actions.emplace_back(step);
        replace_last(elements, act);
    }

    static void replace_last(std::vector<Element>& elements, const Action& act) {
        int line = elements.back().source_line();
        elements.back() = Element::action(act.input_property, act.input_value, act.actions, act.result);
        elements.back().set_source_line(line);
    }

    std::string text_;
    std::vector<ModuleBlock> blocks_;
    int subsection_ = -1;
    bool action_open_ = false;
    bool result_seen_ = false;
};

void render_element(std::string& out, const Element& e) {
    if (auto act = e.as<Action>()) {
        out.append("- ").append(action_opener(act->input_property, act->input_value)).push_back('\n');
        for (std::size_t i = 0; i < act->actions.size(); ++i) {
            out.append("  ").append(std::to_string(i + 1)).append(". ").append(act->actions[i]).push_back('\n');
        }
        if (act->result) out.append("  ").append(kReturnPrefix).append(*act->result).append(".\n");
        return;
    }
    out.append("- ").append(e.inline_text()).push_back('\n');
}

void render_block_into(std::string& out, const ModuleBlock& block) {
    if (block.kind == ModuleKind(NamedModule::Role)) {
        out.append("# Role: ").append(block.title.value_or("")).push_back('\n');
    } else {
        out.append("## ").append(block.kind.name());
        if (block.title) out.append(": ").append(*block.title);
        out.push_back('\n');
    }
    for (const auto& e : block.elements) render_element(out, e);
    for (const auto& sub : block.subsections) {
        out.append("### ").append(sub.title).push_back('\n');
        for (const auto& e : sub.elements) render_element(out, e);
    }
}

}  // namespace

PromptDocument parse(std::string_view text) { return Parser(text).run(); }

std::string render(const PromptDocument& doc) {
    std::string out;
    bool first = true;
    for (const auto* block : doc.canonical_blocks()) {
        if (!first) out.push_back('\n');
        first = false;
        render_block_into(out, *block);
    }
    return out;
}

std::string render_block(const ModuleBlock& block) {
    std::string out;
    render_block_into(out, block);
    return out;
}

std::string render_flat(const PromptDocument& doc) {
    std::string out;
    bool first = true;
    for (const auto* block : doc.canonical_blocks()) {
        if (!first) out.push_back('\n');
        first = false;
        if (block->kind == ModuleKind(NamedModule::Role)) {
            out.append("Role: ").append(*block->title).push_back('\n');
        } else {
            out.append(block->kind.name());
            if (block->title) out.append(" (").append(*block->title).append(")");
            out.append(":\n");
        }
        for (const auto& e : block->elements) out.append(e.inline_text()).push_back('\n');
        for (const auto& sub : block->subsections) {
            out.append(sub.title).append(":\n");
            for (const auto& e : sub.elements) out.append(e.inline_text()).push_back('\n');
        }
    }
    return out;
}

ModuleBlock parse_block(std::string_view text) {
    auto body = text::trim(text);
    bool is_role = body.size() >= 2 && body[0] == '#' && body[1] != '#';
    std::string wrapped = is_role ? std::string(body) : "# Role: placeholder\n" + std::string(body);
    auto doc = parse(wrapped);
    if (is_role) {
        if (doc.blocks().size() != 1) malformed(1, "expected a single Role block");
        return doc.blocks().front();
    }
    const auto& role = doc.blocks().front();
    if (!role.empty() || doc.blocks().size() != 2) malformed(1, "expected exactly one '## <Module>' block");
    return doc.blocks()[1];
}

}  // namespace minstrel::doc
