#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace minstrel::doc {

/// "The <property> is <value>."
struct Assignment {
    std::string property;
    std::string value;
    bool operator==(const Assignment&) const = default;
};

/// "For the given <property> of <value>, please execute the following
/// actions: <actions>; Return the <result>."
struct Action {
    std::string input_property;
    std::string input_value;
    std::vector<std::string> actions;
    std::optional<std::string> result;
    bool operator==(const Action&) const = default;
};

/// Any instruction line that does not follow one of the two templates.
struct Freeform {
    std::string text;
    bool operator==(const Freeform&) const = default;
};

using ElementBody = std::variant<Assignment, Action, Freeform>;

/// One instruction inside a module. Construct through the factories, which
/// trim the slots and enforce the variant invariants, so that every element
/// renders to text that parses back into the same variant.
class Element {
public:
    /// Throws EmptySlot for blank slots, AmbiguousSlot when the property
    /// contains " is ", InvalidElement for multi-line slots.
    static Element assignment(std::string_view property, std::string_view value);
    /// Throws NoActions, EmptySlot, AmbiguousSlot (" of " in the property).
    static Element action(std::string_view input_property, std::string_view input_value,
                          const std::vector<std::string>& actions,
                          std::optional<std::string> result = std::nullopt);
    /// Throws InvalidElement for blank or multi-line text, text starting with
    /// '#', and text that would classify as one of the templates.
    static Element freeform(std::string_view text);

    /// Classifies a single bullet's text: action opener, assignment, or freeform.
    /// A bare action opener (no inline steps) classifies as Freeform; the parser
    /// upgrades it to an Action once numbered steps follow.
    static Element classify(std::string_view text, int source_line = 0);

    const ElementBody& body() const noexcept { return body_; }
    template <typename T>
    const T* as() const noexcept {
        return std::get_if<T>(&body_);
    }
    int source_line() const noexcept { return source_line_; }
    void set_source_line(int line) noexcept { source_line_ = line; }

    /// Single-line form. Actions use the inline "a; b; Return the r." shape.
    std::string inline_text() const;

    /// Structural equality; ignores source_line.
    bool operator==(const Element& other) const { return body_ == other.body_; }

private:
    explicit Element(ElementBody body) : body_(std::move(body)) {}
    ElementBody body_;
    int source_line_ = 0;
};

/// Builds an Assignment element.
Element expand_assignment(std::string_view property, std::string_view value);
/// Builds an Action element; the Return clause is omitted when result is absent.
Element expand_action(std::string_view input_property, std::string_view input_value,
                      const std::vector<std::string>& actions,
                      std::optional<std::string> result = std::nullopt);

/// The bare opener line of an action: "For the given p of v, please execute the following actions:".
std::string action_opener(std::string_view input_property, std::string_view input_value);

struct OpenerMatch {
    std::string property;
    std::string value;
    std::string remainder;  // text after the colon, trimmed
};
/// Matches the action opener prefix, case-insensitively.
std::optional<OpenerMatch> match_action_opener(std::string_view text);

}  // namespace minstrel::doc
