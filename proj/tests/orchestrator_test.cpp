#include "doctest.h"

#include "minstrel/doc/diff.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/error.hpp"
#include "minstrel/orchestrator/compare.hpp"
#include "minstrel/orchestrator/session.hpp"
#include "support/files.hpp"
#include "support/replies.hpp"
#include "support/session_gen.hpp"

#include <thread>

using namespace minstrel;
using namespace minstrel::orchestrator;
using namespace minstrel::testing;
using agents::NamedModule;
using gateway::ScriptedMock;
using replies::on;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Validation;
}

const AgentRegistry& reg() {
    static const AgentRegistry r = AgentRegistry::builtin();
    return r;
}

TaskBrief title_brief() { return {"You need to generate a title for the article.", std::nullopt, "English"}; }

std::vector<gateway::Fixture> pack(const std::string& name) {
    return gateway::load_fixture_pack(source_dir() / "fixtures/sessions" / name);
}

doc::PromptDocument editor() { return doc::parse(read_file(corpus_dir() / "valid/magazine-editor.lgpt.md")); }

std::set<doc::ModuleKind> kinds(std::initializer_list<NamedModule> ms) {
    std::set<doc::ModuleKind> out;
    for (auto m : ms) out.insert(doc::ModuleKind(m));
    return out;
}

void check_state_log(const SessionRecord& s) {
    REQUIRE(!s.state_log.empty());
    CHECK(s.state_log.front() == StateKind::Created);
    CHECK(s.state_log.back() == s.state.kind);
    for (std::size_t i = 1; i < s.state_log.size(); ++i) {
        CHECK_MESSAGE(transition_allowed(s.state_log[i - 1], s.state_log[i]),
                      state_name(s.state_log[i - 1]) << " -> " << state_name(s.state_log[i]));
        if (s.state_log[i] == StateKind::AwaitingUser) CHECK(s.config.interactive);
    }
}

SessionConfig sequential(SessionConfig c = {}) {
    c.parallel = false;
    return c;
}

}  // namespace

TEST_CASE("design pass: title pack yields the magazine-editor draft") {
    ScriptedMock gw(pack("title"));
    auto s = start_session(title_brief(), {}, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Drafted);
    REQUIRE(s.drafts.size() == 1);
    CHECK(s.drafts[0].kinds() == kinds({NamedModule::Role, NamedModule::Profile, NamedModule::Goals,
                                        NamedModule::Constraints, NamedModule::Workflow, NamedModule::Style}));
    CHECK(s.drafts[0] == editor());
    CHECK(doc::render(s.drafts[0]) == read_file(corpus_dir() / "valid/magazine-editor.lgpt.md"));
    CHECK(gw.calls() == 1 + 6);
    check_state_log(s);
}

TEST_CASE("full title session: one revision then convergence") {
    ScriptedMock gw(pack("title"));
    auto s = start_session(title_brief(), sequential(), reg(), gw);
    run_to_completion(s, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Finalized);
    REQUIRE(s.drafts.size() == 2);
    CHECK(doc::diff(s.drafts[0], s.drafts[1]) == kinds({NamedModule::Constraints}));
    CHECK(s.transcripts.size() == 2);
    CHECK(s.directives_history.size() == 2);
    CHECK(s.directives_history[1].converged());
    // 1 analyzer + 6 designers + 2 x (3 + 3 + 10 + 1) + 1 revision
    CHECK(gw.calls() == 42);
    CHECK(gw.remaining() == 0);
    auto final_doc = finalize(s);
    CHECK(final_doc.blocks().size() == 6);
    CHECK_FALSE(doc::lint(final_doc).has_errors());
    check_state_log(s);
}

TEST_CASE("design pass: floor activation gives Role and Goals only") {
    ScriptedMock gw({on(agents::tag::analyzer(), "{\"activated\": []}"),
                     on(agents::tag::designer(NamedModule::Role, false), replies::designer("Role", "# Role: Titler")),
                     on(agents::tag::designer(NamedModule::Goals, false),
                        replies::designer("Goals", "## Goals\n- Write one title."))});
    auto s = start_session(title_brief(), {}, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Drafted);
    CHECK(s.drafts[0].kinds() == kinds({NamedModule::Role, NamedModule::Goals}));
    CHECK(s.drafts[0].role_name() == "Titler");
}

TEST_CASE("design pass: gateway exhaustion fails atomically") {
    auto fx = pack("title");
    fx.resize(5);  // analyzer and four of six designers
    ScriptedMock gw(fx);
    auto s = start_session(title_brief(), {}, reg(), gw);
    CHECK(s.state.kind == StateKind::Failed);
    CHECK(s.drafts.empty());
    CHECK_MESSAGE(s.state.reason.find("EmptyCompletion") == 0, s.state.reason);
    check_state_log(s);
    CHECK(code_of([&] { finalize(s); }) == ErrorCode::NotFinalized);
    CHECK(code_of([&] { run_test_pass(s, reg(), gw); }) == ErrorCode::InvalidState);
}

TEST_CASE("design pass: invalid brief or config is rejected before any call") {
    ScriptedMock gw(pack("title"));
    CHECK(code_of([&] { start_session({"   ", std::nullopt, "English"}, {}, reg(), gw); }) == ErrorCode::Validation);
    SessionConfig bad;
    bad.test_turns = 0;
    CHECK(code_of([&] { start_session(title_brief(), bad, reg(), gw); }) == ErrorCode::Validation);
    CHECK(gw.calls() == 0);
}

TEST_CASE("test pass: transcript and stance tally") {
    ScriptedMock gw(pack("title"));
    auto s = start_session(title_brief(), {}, reg(), gw);
    run_test_pass(s, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Tested);
    REQUIRE(s.transcripts.size() == 1);
    CHECK(s.transcripts[0].size() == 6);
    REQUIRE(s.comments.size() == 5);
    std::map<agents::Stance, int> tally;
    for (const auto& c : s.comments) ++tally[c.stance];
    CHECK(tally == std::map<agents::Stance, int>{{agents::Stance::Critical, 2},
                                                 {agents::Stance::Favorable, 2},
                                                 {agents::Stance::Neutral, 1}});
    SUBCASE("guard leaves the session unchanged") {
        auto before = to_json(s);
        CHECK(code_of([&] { run_test_pass(s, reg(), gw); }) == ErrorCode::InvalidState);
        CHECK(to_json(s) == before);
    }
}

TEST_CASE("test pass: one turn gives two messages") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals}, 1, 0, {{}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({0, 1}), reg(), gw);
    run_test_pass(s, reg(), gw);
    CHECK(s.transcripts.at(0).size() == 2);
}

TEST_CASE("reflection: empty directives finalize without a new draft") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals, NamedModule::Style}, 1, 2, {{}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({2, 1}), reg(), gw);
    run_to_completion(s, reg(), gw);
    CHECK(s.state.kind == StateKind::Finalized);
    CHECK(s.drafts.size() == 1);
    CHECK(gw.calls() == plan.expected_calls());
    CHECK(finalize(s).blocks().size() == 3);
}

TEST_CASE("reflection: max_reflections = 0 finalizes after the first test pass") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals, NamedModule::Style}, 2, 0, {{NamedModule::Style}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({0, 2}), reg(), gw);
    run_to_completion(s, reg(), gw);
    CHECK(s.state.kind == StateKind::Finalized);
    CHECK(s.drafts.size() == 1);
    CHECK(s.transcripts.size() == 1);
    REQUIRE(s.directives_history.size() == 1);
    CHECK(s.directives_history[0].keys() == std::set<NamedModule>{NamedModule::Style});
    CHECK(gw.calls() == plan.expected_calls());
}

TEST_CASE("reflection: revising only the keyed module") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals, NamedModule::Constraints, NamedModule::Style},
                     1,
                     2,
                     {{NamedModule::Constraints}, {}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({2, 1}), reg(), gw);
    run_to_completion(s, reg(), gw);
    REQUIRE(s.drafts.size() == 2);
    CHECK(doc::diff(s.drafts[0], s.drafts[1]) == kinds({NamedModule::Constraints}));
}

TEST_CASE("interactive: user comments gate reflection") {
    SessionConfig cfg = sequential({2, 1, true});
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals, NamedModule::Style}, 1, 2, {{NamedModule::Goals}, {}}};
    auto fx = fixtures_for(plan);
    // The first reflection answers the user's Style comment instead of the critic's Goals issue.
    for (auto& f : fx) {
        if (f.match == agents::tag::reflector()) {
            f.response = replies::reflector({{"Style", "Use a formal register."}});
            break;
        }
    }
    for (auto& f : fx) {
        if (f.match == agents::tag::designer(NamedModule::Goals, true)) {
            f = on(agents::tag::designer(NamedModule::Style, true),
                   replies::designer("Style", "## Style\n- The style of the title should be formal."));
        }
    }
    ScriptedMock gw(fx);
    auto s = start_session(title_brief(), cfg, reg(), gw);
    run_test_pass(s, reg(), gw);
    REQUIRE(s.state.kind == StateKind::AwaitingUser);
    CHECK(code_of([&] { run_reflection_pass(s, reg(), gw); }) == ErrorCode::InvalidState);

    submit_user_comments(s, {agents::user_comment("title style too informal")});
    CHECK(s.state.kind == StateKind::Tested);
    CHECK(s.comments.back().author == "user");
    CHECK(s.comments.back().stance == agents::Stance::User);

    run_reflection_pass(s, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Drafted);
    CHECK(s.directives_history.back().keys() == std::set<NamedModule>{NamedModule::Style});
    CHECK(doc::diff(s.drafts[0], s.drafts[1]) == kinds({NamedModule::Style}));
    auto exchanges = gw.log().snapshot();
    bool seen = false;
    for (const auto& ex : exchanges) {
        const auto& last = ex.messages.back().content;
        if (last.find(agents::tag::reflector()) != std::string::npos) {
            seen = last.find("title style too informal") != std::string::npos;
        }
    }
    CHECK(seen);

    SUBCASE("empty comment list is a valid answer") {
        run_test_pass(s, reg(), gw);
        REQUIRE(s.state.kind == StateKind::AwaitingUser);
        submit_user_comments(s, {});
        CHECK(s.state.kind == StateKind::Tested);
    }
    check_state_log(s);
}

TEST_CASE("user comments: terminal and pre-test sessions refuse input") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals}, 1, 0, {{}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({0, 1}), reg(), gw);
    CHECK(code_of([&] { submit_user_comments(s, {agents::user_comment("hi")}); }) ==
          ErrorCode::SessionNotAwaitingInput);
    run_to_completion(s, reg(), gw);
    REQUIRE(s.state.kind == StateKind::Finalized);
    CHECK(code_of([&] { submit_user_comments(s, {agents::user_comment("too late")}); }) ==
          ErrorCode::SessionNotAwaitingInput);
}

TEST_CASE("user comments: batch mode accepts comments before reflection") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals}, 1, 0, {{}}};
    ScriptedMock gw(fixtures_for(plan));
    auto s = start_session(title_brief(), sequential({0, 1}), reg(), gw);
    run_test_pass(s, reg(), gw);
    CHECK(code_of([&] { submit_user_comments(s, {agents::Comment{"user", agents::Stance::User, {}, {}}}); }) ==
          ErrorCode::Validation);
    submit_user_comments(s, {agents::user_comment("Goals are vague")});
    CHECK(s.state.kind == StateKind::Tested);
    CHECK(s.comments.size() == 6);
}

TEST_CASE("accept_score finalizes early without a reflector call") {
    SessionPlan plan{{NamedModule::Role, NamedModule::Goals}, 1, 2, {{NamedModule::Goals}}};
    auto fx = fixtures_for(plan);
    ScriptedMock gw(fx);
    SessionConfig cfg = sequential({2, 1});
    cfg.accept_score = 5.0;  // final-round plan scores are 5..9
    auto s = start_session(title_brief(), cfg, reg(), gw);
    run_to_completion(s, reg(), gw);
    CHECK(s.state.kind == StateKind::Finalized);
    CHECK(s.latest_mean_score().value_or(0) == doctest::Approx(7.0));
    CHECK(s.directives_history.empty());
    CHECK(gw.calls() == 1 + 2 + 2 + 10);
}

TEST_CASE("property: termination, locality, bounded work, legal transitions") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 150; ++i) {
        auto plan = random_plan(rng);
        ScriptedMock gw(fixtures_for(plan));
        SessionConfig cfg = sequential({plan.max_reflections, plan.test_turns});
        cfg.parallel = i % 2 == 0;
        auto s = start_session(title_brief(), cfg, reg(), gw);
        run_to_completion(s, reg(), gw);
        INFO("plan " << i);
        REQUIRE(s.state.kind == StateKind::Finalized);
        CHECK(static_cast<int>(s.transcripts.size()) <= plan.max_reflections + 1);
        CHECK(static_cast<int>(s.transcripts.size()) == plan.passes());
        CHECK(gw.calls() == plan.expected_calls());
        CHECK(gw.remaining() == 0);
        CHECK(s.drafts[0].kinds().size() == plan.activated.size());
        for (std::size_t d = 0; d + 1 < s.drafts.size(); ++d) {
            std::set<doc::ModuleKind> keys;
            for (auto k : s.directives_history[d].keys()) keys.insert(doc::ModuleKind(k));
            CHECK(doc::diff(s.drafts[d], s.drafts[d + 1]) == keys);
        }
        check_state_log(s);
    }
}

TEST_CASE("property: determinism and parallel/sequential equivalence") {
    std::mt19937 rng(99);
    for (int i = 0; i < 40; ++i) {
        auto plan = random_plan(rng);
        auto run = [&](bool parallel) {
            ScriptedMock gw(fixtures_for(plan));
            SessionConfig cfg{plan.max_reflections, plan.test_turns};
            cfg.parallel = parallel;
            auto s = start_session(title_brief(), cfg, reg(), gw);
            run_to_completion(s, reg(), gw);
            s.config.parallel = false;
            return to_json(s).dump();
        };
        auto a = run(false);
        CHECK(a == run(false));
        CHECK(a == run(true));
    }
}

TEST_CASE("session export round trip and replay") {
    ScriptedMock gw(pack("title"));
    auto s = start_session(title_brief(), sequential(), reg(), gw);
    run_test_pass(s, reg(), gw);
    auto j = to_json(s);
    auto back = session_from_json(j);
    CHECK(to_json(back) == j);
    // The imported record continues where it stopped.
    run_to_completion(back, reg(), gw);
    CHECK(back.state.kind == StateKind::Finalized);
    CHECK(back.drafts.size() == 2);

    auto broken = j;
    broken["state_log"] = {"created", "drafted"};
    broken["state"]["name"] = "drafted";
    CHECK(code_of([&] { session_from_json(broken); }) == ErrorCode::Validation);
    CHECK(code_of([&] { session_from_json(nlohmann::json::object()); }) == ErrorCode::Validation);
}

TEST_CASE("session ids are deterministic and unique per manager") {
    CHECK(make_session_id(title_brief()) == make_session_id(title_brief()));
    CHECK(make_session_id(title_brief()).rfind("you-need-to-generate-", 0) == 0);
    auto factory = std::make_shared<gateway::MockGatewayFactory>(pack("title"));
    SessionManager mgr(reg(), factory);
    auto a = mgr.create(title_brief(), {});
    auto b = mgr.create(title_brief(), {});
    CHECK(a->id() != b->id());
    CHECK(b->id() == a->id() + "-2");
    CHECK(mgr.get(a->id()) == a);
    CHECK(code_of([&] { mgr.get("nope"); }) == ErrorCode::NotFound);
    CHECK(mgr.ids().size() == 2);
}

TEST_CASE("session handle: readers see consistent snapshots during operations") {
    auto factory = std::make_shared<gateway::MockGatewayFactory>(pack("title"));
    SessionManager mgr(reg(), factory);
    auto session = mgr.create(title_brief(), {});
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done) {
            auto snap = session->snapshot();
            CHECK(snap.transcripts.size() * 5 <= snap.comments.size());
            CHECK(snap.state_log.back() == snap.state.kind);
        }
    });
    session->run_to_completion();
    done = true;
    reader.join();
    CHECK(session->state() == StateKind::Finalized);
    CHECK(session->finalize().blocks().size() == 6);
    CHECK(code_of([&] { session->run_test_pass(); }) == ErrorCode::InvalidState);
}

TEST_CASE("baselines: fixed slot mapping") {
    TaskBrief b{"Play a flatterer who praises the user.", "social chat", "English"};
    auto crispe = render_baseline(Baseline::Crispe, b);
    for (auto slot : {"Capacity and Role:", "Insight:", "Statement:", "Personality:", "Experiment:"}) {
        CHECK(crispe.find(slot) != std::string::npos);
    }
    CHECK(crispe.find("Statement: Play a flatterer who praises the user.") != std::string::npos);
    auto costar = render_baseline(Baseline::Costar, b);
    for (auto slot : {"# CONTEXT #", "# OBJECTIVE #", "# STYLE #", "# TONE #", "# AUDIENCE #", "# RESPONSE #"}) {
        CHECK(costar.find(slot) != std::string::npos);
    }
    CHECK(render_baseline(Baseline::InstructionOnly, b) == "Play a flatterer who praises the user.\n");
    CHECK(parse_baseline("CRISPE") == Baseline::Crispe);
    CHECK(code_of([&] { parse_baseline("rtf"); }) == ErrorCode::Validation);
}

namespace {

TaskBrief flatterer_brief() { return {"Play a flatterer who praises the user.", std::nullopt, "English"}; }

std::vector<Variant> flatterer_variants() {
    return {{"instruction-only", Baseline::InstructionOnly},
            {"crispe", Baseline::Crispe},
            {"langgpt", doc::parse(read_file(corpus_dir() / "valid/flatterer.lgpt.md"))}};
}

const std::vector<std::string> kProbes = {"I cooked dinner for my friends tonight.", "I went for a run at sunrise."};

}  // namespace

TEST_CASE("compare: flatterer brief, three variants ranked by mean score") {
    ScriptedMock gw(pack("flatterer"));
    auto report = compare_prompts(flatterer_brief(), flatterer_variants(), kProbes, reg(), gw, false);
    REQUIRE(report.variants.size() == 3);
    for (const auto& v : report.variants) {
        CHECK_FALSE(v.error.has_value());
        CHECK(v.transcript.size() == 4);
        CHECK(v.comments.size() == 5);
    }
    // Oracle: means of the scripted scores.
    CHECK(*report.variants[0].mean_score == doctest::Approx((3 + 4 + 5 + 5 + 4) / 5.0));
    CHECK(*report.variants[1].mean_score == doctest::Approx((5 + 6 + 7 + 7 + 6) / 5.0));
    CHECK(*report.variants[2].mean_score == doctest::Approx((8 + 8 + 9 + 10 + 9) / 5.0));
    CHECK(report.ranking == std::vector<std::string>{"langgpt", "crispe", "instruction-only"});
    CHECK(report.variants[2].system_prompt == read_file(corpus_dir() / "valid/flatterer.lgpt.md"));
    CHECK(gw.remaining() == 0);
    auto j = to_json(report);
    CHECK(j["variants"].size() == 3);
}

TEST_CASE("compare: identical variants give identical transcripts; ties keep input order") {
    std::vector<gateway::Fixture> fx;
    for (int v = 0; v < 2; ++v) {
        fx.push_back(replies::next("same reply"));
        for (const char* id : {"critic-1", "critic-2", "supporter-1", "supporter-2", "neutral-1"}) {
            for (int r = 1; r <= 2; ++r) fx.push_back(on(agents::tag::commentator(id, r), replies::comment(5)));
        }
    }
    ScriptedMock gw(fx);
    auto d = doc::parse(read_file(corpus_dir() / "valid/flatterer.lgpt.md"));
    auto report = compare_prompts(flatterer_brief(), {{"b", d}, {"a", d}}, {"hello"}, reg(), gw, true);
    CHECK(report.variants[0].transcript == report.variants[1].transcript);
    CHECK(report.ranking == std::vector<std::string>{"b", "a"});
}

TEST_CASE("compare: a failing variant is annotated and the report still emitted") {
    auto fx = pack("flatterer");
    fx.resize(fx.size() - 10);  // the last variant's commentators are missing
    ScriptedMock gw(fx);
    auto report = compare_prompts(flatterer_brief(), flatterer_variants(), kProbes, reg(), gw, false);
    REQUIRE(report.variants.size() == 3);
    CHECK_FALSE(report.variants[0].error.has_value());
    REQUIRE(report.variants[2].error.has_value());
    CHECK(report.variants[2].error->find("EmptyCompletion") == 0);
    CHECK(report.ranking.back() == "langgpt");
}

TEST_CASE("compare: argument validation") {
    ScriptedMock gw({replies::next("x")});
    auto v = flatterer_variants();
    CHECK(code_of([&] { compare_prompts(flatterer_brief(), {v[0]}, kProbes, reg(), gw); }) == ErrorCode::Validation);
    CHECK(code_of([&] { compare_prompts(flatterer_brief(), v, {}, reg(), gw); }) == ErrorCode::Validation);
    CHECK(code_of([&] { compare_prompts(flatterer_brief(), {v[0], v[0]}, kProbes, reg(), gw); }) ==
          ErrorCode::Validation);
    CHECK(gw.calls() == 0);
}
