#include "minstrel/doc/element.hpp"

#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"

namespace minstrel::doc {

namespace {

constexpr std::string_view kOpenerPrefix = "For the given ";
constexpr std::string_view kOpenerTail = ", please execute the following actions:";
constexpr std::string_view kReturnPrefix = "Return the ";

void require_single_line(std::string_view slot, std::string_view what) {
    if (slot.find('\n') != std::string_view::npos || slot.find('\r') != std::string_view::npos) {
        throw Error(ErrorCode::InvalidElement, std::string(what) + " spans several lines");
    }
}

std::string require_slot(std::string_view slot, std::string_view what) {
    auto t = text::trim(slot);
    if (t.empty()) throw Error(ErrorCode::EmptySlot, std::string(what) + " is empty");
    require_single_line(t, what);
    return std::string(t);
}

std::optional<Assignment> match_assignment(std::string_view t) {
    if (!text::istarts_with(t, "The ") || t.size() < 6 || t.back() != '.') return std::nullopt;
    auto body = t.substr(4, t.size() - 5);
    auto pos = text::ifind(body, " is ");
    if (pos == std::string_view::npos) return std::nullopt;
    auto property = text::trim(body.substr(0, pos));
    auto value = text::trim(body.substr(pos + 4));
    if (property.empty() || value.empty()) return std::nullopt;
    return Assignment{std::string(property), std::string(value)};
}

std::optional<Action> match_inline_action(std::string_view t) {
    auto opener = match_action_opener(t);
    if (!opener || opener->remainder.empty()) return std::nullopt;
    std::string_view rest = opener->remainder;
    if (rest.back() == '.') rest.remove_suffix(1);
    Action action{opener->property, opener->value, {}, std::nullopt};
    std::size_t start = 0;
    while (start <= rest.size()) {
        auto semi = rest.find(';', start);
        auto piece = text::trim(rest.substr(start, semi == std::string_view::npos ? std::string_view::npos
                                                                                   : semi - start));
        bool last = semi == std::string_view::npos;
        if (last && text::istarts_with(piece, kReturnPrefix)) {
            auto result = text::trim(piece.substr(kReturnPrefix.size()));
            if (!result.empty()) action.result = std::string(result);
        } else if (!piece.empty()) {
            action.actions.emplace_back(piece);
        }
        if (last) break;
        start = semi + 1;
    }
    if (action.actions.empty()) return std::nullopt;
    return action;
}

}  // namespace

std::optional<OpenerMatch> match_action_opener(std::string_view text) {
    auto t = text::trim(text);
    if (!text::istarts_with(t, kOpenerPrefix)) return std::nullopt;
    auto tail = text::ifind(t, kOpenerTail, kOpenerPrefix.size());
    if (tail == std::string_view::npos) return std::nullopt;
    auto head = t.substr(kOpenerPrefix.size(), tail - kOpenerPrefix.size());
    auto of = text::ifind(head, " of ");
    if (of == std::string_view::npos) return std::nullopt;
    auto property = text::trim(head.substr(0, of));
    auto value = text::trim(head.substr(of + 4));
    if (property.empty() || value.empty()) return std::nullopt;
    return OpenerMatch{std::string(property), std::string(value),
                       std::string(text::trim(t.substr(tail + kOpenerTail.size())))};
}

std::string action_opener(std::string_view input_property, std::string_view input_value) {
    std::string out(kOpenerPrefix);
    out.append(input_property).append(" of ").append(input_value).append(kOpenerTail);
    return out;
}

Element Element::assignment(std::string_view property, std::string_view value) {
    Assignment a{require_slot(property, "property"), require_slot(value, "value")};
    auto rendered = "The " + a.property + " is " + a.value + ".";
    auto back = match_assignment(rendered);
    if (!back || *back != a) {
        throw Error(ErrorCode::AmbiguousSlot,
                    "assignment '" + rendered + "' does not parse back into the same slots");
    }
    return Element(std::move(a));
}

Element Element::action(std::string_view input_property, std::string_view input_value,
                        const std::vector<std::string>& actions, std::optional<std::string> result) {
    if (actions.empty()) throw Error(ErrorCode::NoActions, "action element needs at least one step");
    Action a{require_slot(input_property, "input property"), require_slot(input_value, "input value"), {},
             std::nullopt};
    for (const auto& step : actions) a.actions.push_back(require_slot(step, "action step"));
    if (result) a.result = require_slot(*result, "result");
    auto opener = match_action_opener(action_opener(a.input_property, a.input_value));
    if (!opener || opener->property != a.input_property || opener->value != a.input_value) {
        throw Error(ErrorCode::AmbiguousSlot, "action opener for '" + a.input_property + "' / '" +
                                                  a.input_value + "' does not parse back into the same slots");
    }
    return Element(std::move(a));
}

Element Element::freeform(std::string_view text) {
    auto t = text::trim(text);
    if (t.empty()) throw Error(ErrorCode::InvalidElement, "freeform element is empty");
    require_single_line(t, "freeform element");
    if (t.front() == '#') throw Error(ErrorCode::InvalidElement, "freeform element starts with a heading marker");
    auto e = classify(t);
    if (!e.as<Freeform>()) {
        throw Error(ErrorCode::InvalidElement, "freeform text '" + std::string(t) + "' matches an element template");
    }
    return e;
}

Element Element::classify(std::string_view raw, int source_line) {
    auto t = text::trim(raw);
    Element e = [&]() -> Element {
        if (auto act = match_inline_action(t)) return Element(std::move(*act));
        if (auto asg = match_assignment(t)) return Element(std::move(*asg));
        return Element(Freeform{std::string(t)});
    }();
    e.source_line_ = source_line;
    return e;
}

std::string Element::inline_text() const {
    if (auto a = as<Assignment>()) return "The " + a->property + " is " + a->value + ".";
    if (auto f = as<Freeform>()) return f->text;
    const auto& act = std::get<Action>(body_);
    std::string out = action_opener(act.input_property, act.input_value);
    out.push_back(' ');
    for (std::size_t i = 0; i < act.actions.size(); ++i) {
        if (i) out.append("; ");
        out.append(act.actions[i]);
    }
    if (act.result) {
        out.append("; ").append(kReturnPrefix).append(*act.result);
    }
    out.push_back('.');
    return out;
}

Element expand_assignment(std::string_view property, std::string_view value) {
    return Element::assignment(property, value);
}

Element expand_action(std::string_view input_property, std::string_view input_value,
                      const std::vector<std::string>& actions, std::optional<std::string> result) {
    return Element::action(input_property, input_value, actions, std::move(result));
}

}  // namespace minstrel::doc
