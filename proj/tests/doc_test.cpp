#include "doctest.h"

#include "minstrel/doc/diff.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/error.hpp"
#include "support/doc_gen.hpp"
#include "support/files.hpp"

#include <filesystem>
#include <random>

using namespace minstrel;
using namespace minstrel::doc;
namespace fs = std::filesystem;

namespace {

ErrorCode parse_error(std::string_view text, int* line = nullptr) {
    try {
        (void)parse(text);
    } catch (const Error& e) {
        if (line) *line = e.line();
        return e.code();
    }
    FAIL("expected a parse error");
    return ErrorCode::Validation;
}

bool has_rule(const LintReport& r, std::string_view id) {
    for (const auto& f : r.findings)
        if (f.rule_id == id) return true;
    return false;
}

}  // namespace

TEST_SUITE("module kinds") {
    TEST_CASE("aliases normalize to one kind") {
        CHECK(lookup_named_module("Constraint") == NamedModule::Constraints);
        CHECK(lookup_named_module("constraints") == NamedModule::Constraints);
        CHECK(lookup_named_module("Attention") == NamedModule::Constraints);
        CHECK(lookup_named_module("Goal") == NamedModule::Goals);
        CHECK(lookup_named_module("Workflows") == NamedModule::Workflow);
        CHECK(lookup_named_module("Output format") == NamedModule::OutputFormat);
        CHECK(lookup_named_module("output_format") == NamedModule::OutputFormat);
        CHECK_FALSE(lookup_named_module("World Rules"));
        CHECK(all_named_modules().size() == 13);
    }

    TEST_CASE("custom kinds") {
        auto a = ModuleKind::custom("Notes");
        CHECK(a.is_custom());
        CHECK(a == ModuleKind::custom("NOTES"));
        CHECK_THROWS_AS(ModuleKind::custom("Attention"), Error);
        CHECK_THROWS_AS(ModuleKind::custom(""), Error);
        CHECK_THROWS_AS(ModuleKind::custom("a:b"), Error);
        CHECK(ModuleKind(NamedModule::Command) < a);
        CHECK(a < ModuleKind(NamedModule::Initialization));
    }
}

TEST_SUITE("element templates") {
    TEST_CASE("assignment renders the property/value template") {
        CHECK(expand_assignment("Language", "English").inline_text() == "The Language is English.");
        CHECK(expand_assignment("x", "x").inline_text() == "The x is x.");
        CHECK(expand_assignment("output length", "no more than 500 words").inline_text() ==
              "The output length is no more than 500 words.");
    }

    TEST_CASE("assignment slot errors") {
        auto code = [](auto fn) {
            try {
                fn();
            } catch (const Error& e) {
                return e.code();
            }
            return ErrorCode::Validation;
        };
        CHECK(code([] { expand_assignment("  ", "v"); }) == ErrorCode::EmptySlot);
        CHECK(code([] { expand_assignment("p", ""); }) == ErrorCode::EmptySlot);
        CHECK(code([] { expand_assignment("this is it", "v"); }) == ErrorCode::AmbiguousSlot);
        CHECK(code([] { expand_action("x", "y", {}); }) == ErrorCode::NoActions);
        CHECK(code([] { expand_action("length of text", "y", {"a"}); }) == ErrorCode::AmbiguousSlot);
        CHECK(code([] { expand_action("x", "y", {"  "}); }) == ErrorCode::EmptySlot);
    }

    TEST_CASE("action renders with and without a Return clause") {
        auto with = expand_action("x", "y", {"a"}, std::string("a"));
        CHECK(with.inline_text() == "For the given x of y, please execute the following actions: a; Return the a.");
        auto without = expand_action("article", "⟨ARTICLE⟩", {"Analyse the theme of the article", "Save the kernel content"});
        CHECK(without.inline_text() ==
              "For the given article of ⟨ARTICLE⟩, please execute the following actions: Analyse the theme of the "
              "article; Save the kernel content.");
        auto back = Element::classify(with.inline_text());
        CHECK(back == with);
    }

    TEST_CASE("classification") {
        CHECK(Element::classify("The tone is warm.").as<Assignment>());
        CHECK(Element::classify("the tone IS warm.").as<Assignment>()->value == "warm");
        CHECK(Element::classify("The tone is warm").as<Freeform>());
        CHECK(Element::classify("Language: English").as<Freeform>());
        CHECK(Element::classify("For the given a of b, please execute the following actions:").as<Freeform>());
        CHECK_THROWS_AS(Element::freeform("The tone is warm."), Error);
        CHECK_THROWS_AS(Element::freeform("# heading"), Error);
    }
}

TEST_SUITE("parse") {
    TEST_CASE("title-editor fixture") {
        auto d = parse(testing::read_file(testing::corpus_dir() / "valid/magazine-editor.lgpt.md"));
        CHECK(d.role_name() == "Magazine Editor");
        REQUIRE(d.blocks().size() == 6);
        std::set<ModuleKind> expected = {NamedModule::Role, NamedModule::Profile, NamedModule::Goals,
                                         NamedModule::Constraints, NamedModule::Workflow, NamedModule::Style};
        CHECK(d.kinds() == expected);
        const auto* wf = d.find(NamedModule::Workflow);
        REQUIRE(wf);
        REQUIRE(wf->subsections.size() == 1);
        CHECK(wf->subsections[0].title == "Extracting the kernel content");
        REQUIRE(wf->subsections[0].elements.size() == 1);
        const auto* act = wf->subsections[0].elements[0].as<Action>();
        REQUIRE(act);
        CHECK(act->actions.size() == 4);
        CHECK(act->input_property == "article");
        CHECK_FALSE(act->result);
        CHECK(wf->subsections[0].elements[0] ==
              expand_action("article", "⟨ARTICLE⟩",
                            {"Analyse the theme of the article",
                             "Detecting the main objects and related things described in the article",
                             "Summarising the core content from the article", "Save the kernel content"}));
        auto text = render(d);
        CHECK(text.find("The length of the title should not exceed 20 words.") != std::string::npos);
    }

    TEST_CASE("blocks keep source order") {
        auto d = parse("# Role: R\n\n## Style\n- s\n\n## Goals\n- g\n");
        CHECK(d.blocks()[1].kind == ModuleKind(NamedModule::Style));
        CHECK(d.blocks()[2].kind == ModuleKind(NamedModule::Goals));
        CHECK(d.blocks()[2].source_line == 6);
        CHECK(d.blocks()[2].elements[0].source_line() == 7);
    }

    TEST_CASE("errors") {
        CHECK(parse_error("") == ErrorCode::MissingRole);
        int line = 0;
        CHECK(parse_error("# Role: A\n## Goals\n- x\n## Goal\n", &line) == ErrorCode::DuplicateModule);
        CHECK(line == 4);
        CHECK(parse_error("# Role: A\n### \n", &line) == ErrorCode::MalformedHeading);
        CHECK(line == 2);
        CHECK(parse_error("# Role: A\n## Notes:\n", &line) == ErrorCode::MalformedHeading);
        CHECK(parse_error("# Role: A\n  # indented\n", &line) == ErrorCode::MalformedHeading);
        CHECK(parse_error("# Role: A\n- # hash\n", &line) == ErrorCode::MalformedHeading);
    }

    TEST_CASE("invalid corpus matches sidecar codes") {
        int n = 0;
        for (const auto& entry : fs::directory_iterator(testing::corpus_dir() / "invalid")) {
            if (entry.path().extension() != ".txt") continue;
            ++n;
            auto expected = testing::read_file(fs::path(entry.path()).replace_extension(".expected"));
            CAPTURE(entry.path().filename().string());
            int line = 0;
            auto code = parse_error(testing::read_file(entry.path()), &line);
            std::string got(code_name(code));
            if (line) got += " " + std::to_string(line);
            CHECK(got == std::string(text::trim(expected)));
        }
        CHECK(n >= 10);
    }

    TEST_CASE("noncanonical input normalizes") {
        auto d = parse(testing::read_file(testing::corpus_dir() / "noncanonical/aliases-and-order.lgpt.md"));
        CHECK(d.has(NamedModule::Constraints));
        CHECK(d.has(NamedModule::Goals));
        auto style = d.find(NamedModule::Style);
        REQUIRE(style);
        CHECK(style->elements[0].as<Assignment>());
        const auto* act = d.find(NamedModule::Workflow)->subsections[0].elements[0].as<Action>();
        REQUIRE(act);
        CHECK(act->actions.size() == 4);

        auto crlf = parse(testing::read_file(testing::corpus_dir() / "noncanonical/crlf.lgpt.md"));
        CHECK(crlf.has(NamedModule::OutputFormat));
        CHECK(render(crlf).find('\r') == std::string::npos);

        auto init = parse(testing::read_file(testing::corpus_dir() / "noncanonical/init-first.lgpt.md"));
        CHECK(init.role_name() == "Greeter");
        const auto* c = init.find(NamedModule::Constraints)->elements[0].as<Action>();
        REQUIRE(c);
        CHECK(c->actions.size() == 2);
        CHECK(c->result == "greeting");
    }

    TEST_CASE("parse_block") {
        auto b = parse_block("## Constraints\n- The length of the title should not exceed 20 words.\n");
        CHECK(b.kind == ModuleKind(NamedModule::Constraints));
        CHECK(b.elements.size() == 1);
        auto r = parse_block("# Role: Editor\n- extra\n");
        CHECK(r.title == "Editor");
        CHECK_THROWS_AS(parse_block("## Goals\n- a\n## Style\n- b\n"), Error);
        CHECK_THROWS_AS(parse_block("- stray\n## Goals\n- a\n"), Error);
    }
}

TEST_SUITE("render") {
    TEST_CASE("minimal document") { CHECK(render(PromptDocument("Magazine Editor")) == "# Role: Magazine Editor\n"); }

    TEST_CASE("canonical order with custom blocks and Initialization last") {
        PromptDocument d("R");
        ModuleBlock init(NamedModule::Initialization);
        init.elements.push_back(Element::freeform("Start."));
        d.add(init);
        ModuleBlock notes(ModuleKind::custom("Notes"));
        notes.elements.push_back(Element::freeform("n"));
        d.add(notes);
        ModuleBlock goals(NamedModule::Goals);
        goals.elements.push_back(Element::freeform("g"));
        d.add(goals);
        ModuleBlock extra(ModuleKind::custom("Appendix"));
        extra.elements.push_back(Element::freeform("a"));
        d.add(extra);
        CHECK(render(d) ==
              "# Role: R\n\n## Goals\n- g\n\n## Notes\n- n\n\n## Appendix\n- a\n\n## Initialization\n- Start.\n");
    }

    TEST_CASE("action with result renders numbered steps") {
        PromptDocument d("R");
        ModuleBlock wf(NamedModule::Workflow);
        wf.title = "Main";
        wf.elements.push_back(expand_action("x", "y", {"a", "b"}, std::string("c")));
        d.add(wf);
        CHECK(render(d) ==
              "# Role: R\n\n## Workflow: Main\n- For the given x of y, please execute the following actions:\n"
              "  1. a\n  2. b\n  Return the c.\n");
        CHECK(parse(render(d)) == d);
    }

    TEST_CASE("flat rendering drops markup") {
        auto d = parse(testing::read_file(testing::corpus_dir() / "valid/magazine-editor.lgpt.md"));
        auto flat = render_flat(d);
        CHECK(flat.rfind("Role: Magazine Editor\n", 0) == 0);
        CHECK(flat.find('#') == std::string::npos);
        CHECK(flat.find("please execute the following actions: Analyse the theme") != std::string::npos);
    }
}

TEST_SUITE("round trip") {
    TEST_CASE("golden corpus: fixpoint and idempotence") {
        int n = 0;
        for (const auto& path : testing::corpus_files("valid")) {
            CAPTURE(path.string());
            auto original = testing::read_file(path);
            auto d = parse(original);
            CHECK(render(d) == original);
            CHECK(parse(render(d)) == d);
            ++n;
        }
        CHECK(n >= 20);
        for (const auto& path : testing::corpus_files("noncanonical")) {
            CAPTURE(path.string());
            auto d = parse(testing::read_file(path));
            auto canonical = render(d);
            CHECK(parse(canonical) == d);
            CHECK(render(parse(canonical)) == canonical);
        }
    }

    TEST_CASE("property: random documents survive render/parse") {
        std::mt19937 rng(20240917);
        for (int i = 0; i < 500; ++i) {
            auto d = testing::random_document(rng);
            auto text = render(d);
            CAPTURE(text);
            auto back = parse(text);
            REQUIRE(back == d);
            CHECK(render(back) == text);
        }
    }

    TEST_CASE("property: template inversion") {
        std::mt19937 rng(7);
        for (int i = 0; i < 300; ++i) {
            auto e = testing::random_element(rng);
            PromptDocument d("R");
            ModuleBlock wf(NamedModule::Workflow);
            wf.elements.push_back(e);
            d.add(wf);
            auto back = parse(render(d));
            REQUIRE(back.find(NamedModule::Workflow)->elements.size() == 1);
            CHECK(back.find(NamedModule::Workflow)->elements[0] == e);
        }
    }
}

TEST_SUITE("lint") {
    TEST_CASE("title-editor fixture has no errors") {
        auto r = lint(parse(testing::read_file(testing::corpus_dir() / "valid/magazine-editor.lgpt.md")));
        CHECK_FALSE(r.has_errors());
        CHECK(has_rule(r, "I001"));
    }

    TEST_CASE("role only") {
        auto r = lint(PromptDocument("x"));
        CHECK(has_rule(r, "E001"));
        CHECK(has_rule(r, "W001"));
        CHECK(r.has_errors());
    }

    TEST_CASE("individual rules") {
        auto d = parse(
            "# Role: R\n\n## Initialization\n- hi\n\n## Goals\n\n## Style\n### Sub\n- x\n\n## Profile\n- version: 1.0.0\n");
        auto r = lint(d);
        CHECK(has_rule(r, "E002"));
        CHECK(has_rule(r, "W002"));
        CHECK(has_rule(r, "W003"));
        CHECK(has_rule(r, "W001"));
        CHECK_FALSE(has_rule(r, "I001"));
        CHECK(profile_version(d) == "1.0.0");
        CHECK(profile_version(parse("# Role: R\n## Profile\n- The version is 2.0.0.\n")) == "2.0.0");
    }

    TEST_CASE("property: lint is total, sorted and deterministic") {
        std::mt19937 rng(99);
        for (int i = 0; i < 300; ++i) {
            auto d = testing::random_document(rng);
            if (rng() % 4 == 0) {
                ModuleBlock empty(ModuleKind::custom("Empty"));
                d.put(empty);
            }
            auto d2 = parse(render(d));
            auto r = lint(d2);
            for (std::size_t k = 1; k < r.findings.size(); ++k) {
                const auto& a = r.findings[k - 1];
                const auto& b = r.findings[k];
                CHECK(std::tie(a.line, a.rule_id) <= std::tie(b.line, b.rule_id));
            }
            CHECK(lint(d2).findings == r.findings);
        }
    }
}

TEST_SUITE("diff") {
    TEST_CASE("identity and single edit") {
        auto d = parse(testing::read_file(testing::corpus_dir() / "valid/magazine-editor.lgpt.md"));
        CHECK(diff(d, d).empty());
        auto edited = d;
        ModuleBlock c(NamedModule::Constraints);
        c.elements.push_back(Element::freeform("The length of the title should not exceed 12 words."));
        edited.put(c);
        CHECK(diff(d, edited) == std::set<ModuleKind>{NamedModule::Constraints});
    }

    TEST_CASE("property: random single-block edits") {
        std::mt19937 rng(4242);
        for (int i = 0; i < 300; ++i) {
            auto d = testing::random_document(rng);
            auto kinds = d.kinds();
            std::vector<ModuleKind> pool(kinds.begin(), kinds.end());
            auto target = pool[rng() % pool.size()];
            auto edited = d;
            ModuleBlock b = *d.find(target);
            if (target == ModuleKind(NamedModule::Role)) {
                b.title = *b.title + " II";
            } else {
                b.elements.push_back(Element::freeform("Please also edit " + std::to_string(i)));
            }
            edited.put(b);
            CHECK(diff(d, edited) == std::set<ModuleKind>{target});
            CHECK(diff(edited, d) == std::set<ModuleKind>{target});
        }
    }

    TEST_CASE("added and removed kinds") {
        PromptDocument a("R");
        auto b = a;
        ModuleBlock s(NamedModule::Style);
        s.elements.push_back(Element::freeform("x"));
        b.add(s);
        CHECK(diff(a, b) == std::set<ModuleKind>{NamedModule::Style});
        CHECK(diff(b, a) == std::set<ModuleKind>{NamedModule::Style});
    }
}
