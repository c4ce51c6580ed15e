#include "minstrel/cli/cli.hpp"

#include "minstrel/agents/json.hpp"
#include "minstrel/agents/registry.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/doc/text.hpp"
#include "minstrel/gateway/http.hpp"
#include "minstrel/gateway/mock.hpp"
#include "minstrel/orchestrator/compare.hpp"
#include "minstrel/orchestrator/session.hpp"
#include "minstrel/service/server.hpp"
#include "minstrel/store/store.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace minstrel::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using orchestrator::SessionRecord;
using orchestrator::StateKind;

namespace {

struct Globals {
    std::string mock;
    std::string agents_dir;
    std::string endpoints;
    std::string store;
    bool json = false;
};

struct Ctx {
    Globals g;
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& content) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
        f << content;
        if (!f.flush()) throw Error(ErrorCode::Io, "cannot write " + p.string());
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot write " + p.string() + ": " + ec.message());
}

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

std::string endpoints_path(const Globals& g) { return g.endpoints.empty() ? env_or("MINSTREL_ENDPOINTS", "") : g.endpoints; }

std::shared_ptr<const gateway::GatewayFactory> make_factory(const Globals& g) {
    if (!g.mock.empty()) return std::make_shared<gateway::MockGatewayFactory>(gateway::load_fixture_pack(g.mock));
    auto path = endpoints_path(g);
    return std::make_shared<gateway::HttpGatewayFactory>(path.empty() ? gateway::EndpointConfig{}
                                                                      : gateway::load_endpoint_config(path));
}

agents::AgentRegistry make_registry(const Globals& g) {
    auto reg = g.agents_dir.empty() ? agents::AgentRegistry::builtin() : agents::AgentRegistry::from_directory(g.agents_dir);
    auto path = endpoints_path(g);
    if (g.mock.empty() && !path.empty()) {
        // Optional per-agent overrides: {"default": {...}, "agents": {"commentator": {...}}}
        json j;
        try {
            j = json::parse(read_text(path));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, "endpoints file: " + std::string(e.what()));
        }
        if (j.is_object() && j.contains("agents")) {
            auto base = gateway::load_endpoint_config(path);
            for (const auto& [selector, cfg] : j["agents"].items()) {
                reg.set_endpoint_override(selector, gateway::endpoint_from_json(cfg, base));
            }
        }
    }
    return reg;
}

store::PromptStore open_store(const Globals& g) {
    return store::PromptStore(g.store.empty() ? env_or("MINSTREL_STORE", "minstrel-store") : g.store);
}

SessionRecord load_session(const fs::path& p) {
    json j;
    try {
        j = json::parse(read_text(p));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Validation, p.string() + " is not JSON: " + e.what());
    }
    return orchestrator::session_from_json(j);
}

void save_session(const fs::path& p, const SessionRecord& s) { write_text(p, orchestrator::to_json(s).dump(2) + "\n"); }

void print_findings(Ctx& c, const std::string& path, const doc::LintReport& report) {
    for (const auto& f : report.findings) {
        c.out << path << ":" << f.line << ": " << doc::severity_name(f.severity) << " " << f.rule_id << ": " << f.message
              << "\n";
    }
}

std::string score_text(const std::optional<double>& s) {
    if (!s) return "-";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(1) << *s;
    return ss.str();
}

void print_session(Ctx& c, const SessionRecord& s) {
    if (c.g.json) {
        c.out << service::session_view(s).dump(2) << "\n";
        return;
    }
    c.out << "session " << s.session_id << ": " << orchestrator::state_name(s.state.kind);
    if (s.state.kind == StateKind::Failed) c.out << " (" << s.state.reason << ")";
    c.out << "\n  drafts: " << s.drafts.size() << ", test passes: " << s.transcripts.size()
          << ", mean score: " << score_text(s.latest_mean_score()) << "\n";
    if (!s.drafts.empty()) {
        c.out << "  modules:";
        for (const auto* b : s.drafts.back().canonical_blocks()) c.out << " " << b->kind.name();
        c.out << "\n";
    }
    for (std::size_t i = 0; i < s.directives_history.size(); ++i) {
        c.out << "  reflection " << i + 1 << ":";
        if (s.directives_history[i].converged()) c.out << " converged";
        for (const auto& [m, why] : s.directives_history[i].directives) c.out << " " << doc::module_name(m);
        c.out << "\n";
    }
}

/// Shows the latest test pass and reads comment lines until a blank line.
/// Returns nullopt at end of input.
std::optional<std::vector<agents::Comment>> ask_comments(Ctx& c, const SessionRecord& s) {
    c.err << "\n--- test dialogue " << s.transcripts.size() << " ---\n";
    for (const auto& m : s.transcripts.back()) c.err << gateway::role_name(m.role) << ": " << m.content << "\n";
    c.err << "--- commentators ---\n";
    for (auto it = s.comments.end() - std::min<std::ptrdiff_t>(5, static_cast<std::ptrdiff_t>(s.comments.size()));
         it != s.comments.end(); ++it) {
        if (it->stance == agents::Stance::User) continue;
        c.err << it->author << " (" << agents::stance_name(it->stance) << ") " << it->score.value_or(0) << "/10\n";
        for (const auto& i : it->issues) c.err << "  - " << i.text << "\n";
    }
    c.err << "Your comments, one per line; an empty line submits:\n" << std::flush;
    std::vector<agents::Comment> out;
    std::string line;
    bool any = false;
    while (std::getline(c.in, line)) {
        any = true;
        auto t = text::trim(line);
        if (t.empty()) return out;
        out.push_back(agents::user_comment(std::string(t)));
    }
    if (!any) return std::nullopt;
    return out;
}

std::vector<agents::Comment> comments_from(const std::vector<std::string>& texts, const std::string& module) {
    std::optional<doc::NamedModule> hint;
    if (!module.empty()) {
        hint = doc::lookup_named_module(module);
        if (!hint) throw Error(ErrorCode::Validation, "unknown module '" + module + "'");
    }
    std::vector<agents::Comment> out;
    for (const auto& t : texts) out.push_back(agents::user_comment(t, hint));
    return out;
}

fs::path default_prompt_path(const doc::PromptDocument& d) { return text::slugify(d.role_name()) + ".lgpt.md"; }

// ---- commands -------------------------------------------------------------

int cmd_lint(Ctx& c, const std::vector<std::string>& files) {
    int worst = kOk;
    json results = json::array();
    for (const auto& path : files) {
        try {
            auto d = doc::parse(read_text(path));
            auto report = doc::lint(d);
            if (c.g.json) {
                auto r = service::to_json(report);
                r["path"] = path;
                results.push_back(r);
            } else {
                print_findings(c, path, report);
            }
            if (report.has_errors()) worst = std::max(worst, static_cast<int>(kLintErrors));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::Io) throw;
            if (c.g.json) {
                results.push_back({{"path", path}, {"parse_error", {{"code", e.code_name()}, {"line", e.line()}, {"message", e.what()}}}});
            } else {
                c.out << path << ":" << e.line() << ": error " << e.code_name() << ": " << e.what() << "\n";
            }
            worst = std::max(worst, static_cast<int>(kParse));
        }
    }
    if (c.g.json) c.out << json{{"files", results}}.dump(2) << "\n";
    return worst;
}

int cmd_fmt(Ctx& c, const std::string& path, bool to_stdout, bool check) {
    auto text = read_text(path);
    auto canonical = doc::render(doc::parse(text));
    if (to_stdout) {
        c.out << canonical;
        return kOk;
    }
    const bool changed = canonical != text;
    if (check) {
        if (changed) c.out << "would reformat " << path << "\n";
        return changed ? kLintErrors : kOk;
    }
    if (changed) write_text(path, canonical);
    if (!c.g.json) c.out << (changed ? "formatted " : "unchanged ") << path << "\n";
    else c.out << json{{"path", path}, {"changed", changed}}.dump() << "\n";
    return kOk;
}

int cmd_render(Ctx& c, const std::string& path, bool canonical) {
    auto d = doc::parse(read_text(path));
    c.out << (canonical ? doc::render(d) : doc::render_flat(d));
    return kOk;
}

struct GenerateOpts {
    agents::TaskBrief brief;
    orchestrator::SessionConfig config;
    bool design_only = false;
    bool save = false;
    std::string output;
    std::string session_out;
    std::string transcript;
    std::optional<double> accept_score;
};

int finish_session(Ctx& c, const SessionRecord& s, gateway::Gateway& gw, const std::string& output,
                   const std::string& session_out, const std::string& transcript, bool save, bool prompt_ready) {
    json summary = {{"session_id", s.session_id}, {"state", orchestrator::state_name(s.state.kind)}, {"calls", gw.log().size()}};
    if (!session_out.empty()) {
        save_session(session_out, s);
        summary["session_file"] = session_out;
    }
    if (!transcript.empty()) {
        write_text(transcript, gateway::export_transcript(gw.log().snapshot()));
        summary["transcript_file"] = transcript;
    }
    if (prompt_ready && !s.drafts.empty()) {
        const auto& d = s.drafts.back();
        fs::path out = output.empty() ? default_prompt_path(d) : fs::path(output);
        if (output == "-") {
            c.out << doc::render(d);
        } else {
            write_text(out, doc::render(d));
            summary["prompt_file"] = out.string();
        }
        if (save) {
            auto stored = open_store(c.g).save(d);
            summary["stored"] = {{"id", stored.id}, {"version", stored.version}};
        }
    }
    if (s.state.kind == StateKind::Failed) summary["reason"] = s.state.reason;
    if (c.g.json) {
        c.out << summary.dump(2) << "\n";
    } else if (output != "-") {
        print_session(c, s);
        if (summary.contains("prompt_file")) c.out << "  prompt: " << summary["prompt_file"].get<std::string>() << "\n";
        if (summary.contains("session_file")) c.out << "  session: " << session_out << "\n";
        if (summary.contains("stored")) {
            c.out << "  stored: " << summary["stored"]["id"].get<std::string>() << " "
                  << summary["stored"]["version"].get<std::string>() << "\n";
        }
    }
    if (s.state.kind == StateKind::Failed) {
        c.err << "error: " << s.state.reason << "\n";
        return kAgent;
    }
    return kOk;
}

/// Runs passes; in interactive sessions asks for comments on stdin. Stops at
/// a terminal state or, when input ends, in AwaitingUser.
void drive(Ctx& c, SessionRecord& s, const agents::AgentRegistry& reg, gateway::Gateway& gw) {
    while (true) {
        orchestrator::run_to_completion(s, reg, gw);
        if (s.state.kind != StateKind::AwaitingUser) return;
        auto comments = ask_comments(c, s);
        if (!comments) {
            c.err << "input ended; session paused awaiting comments\n";
            return;
        }
        orchestrator::submit_user_comments(s, *comments);
    }
}

int cmd_generate(Ctx& c, GenerateOpts o) {
    auto reg = make_registry(c.g);
    auto factory = make_factory(c.g);
    o.config.parallel = !factory->offline();
    o.config.accept_score = o.accept_score;
    auto gw = factory->create();
    auto s = orchestrator::start_session(o.brief, o.config, reg, *gw);
    if (!o.design_only) drive(c, s, reg, *gw);
    std::string session_out = o.session_out;
    const bool paused = !s.state.terminal() && !o.design_only;
    if (paused && session_out.empty()) session_out = s.session_id + ".session.json";
    const bool ready = s.state.kind == StateKind::Finalized || (o.design_only && s.state.kind == StateKind::Drafted);
    return finish_session(c, s, *gw, o.output, session_out, o.transcript, o.save && s.state.kind == StateKind::Finalized,
                          ready);
}

enum class Step { Test, Comment, Reflect, Refine };

int cmd_session_step(Ctx& c, Step step, const std::string& path, const std::vector<std::string>& comments,
                     const std::string& module, const std::string& output) {
    auto s = load_session(path);
    auto reg = make_registry(c.g);
    auto factory = make_factory(c.g);
    s.config.parallel = !factory->offline();
    auto gw = factory->create();
    switch (step) {
        case Step::Test: orchestrator::run_test_pass(s, reg, *gw); break;
        case Step::Comment: orchestrator::submit_user_comments(s, comments_from(comments, module)); break;
        case Step::Reflect: orchestrator::run_reflection_pass(s, reg, *gw); break;
        case Step::Refine:
            orchestrator::submit_user_comments(s, comments_from(comments, module));
            if (s.state.kind == StateKind::Tested) orchestrator::run_reflection_pass(s, reg, *gw);
            // Stops at the next pause; the caller comments again with another refine.
            if (!s.state.terminal()) orchestrator::run_to_completion(s, reg, *gw);
            break;
    }
    return finish_session(c, s, *gw, output, path, "", false,
                          s.state.kind == StateKind::Finalized && !output.empty());
}

int cmd_finalize(Ctx& c, const std::string& path, const std::string& output, bool save) {
    auto s = load_session(path);
    const auto& d = orchestrator::finalize(s);
    json summary = {{"session_id", s.session_id}};
    if (output.empty() || output == "-") {
        c.out << doc::render(d);
    } else {
        write_text(output, doc::render(d));
        summary["prompt_file"] = output;
    }
    if (save) {
        auto stored = open_store(c.g).save(d);
        summary["stored"] = {{"id", stored.id}, {"version", stored.version}};
        if (!c.g.json) c.err << "stored " << stored.id << " " << stored.version << "\n";
    }
    if (c.g.json && !output.empty() && output != "-") c.out << summary.dump(2) << "\n";
    return kOk;
}

int cmd_show(Ctx& c, const std::string& path) {
    print_session(c, load_session(path));
    return kOk;
}

int cmd_compare(Ctx& c, const agents::TaskBrief& brief, const std::vector<std::string>& specs,
                const std::vector<std::string>& probes, const std::string& output) {
    std::vector<orchestrator::Variant> variants;
    for (const auto& spec : specs) {
        auto eq = spec.find('=');
        if (eq == std::string::npos && !spec.ends_with(".md")) {
            auto b = orchestrator::parse_baseline(spec);
            variants.push_back({std::string(orchestrator::baseline_name(b)), b});
            continue;
        }
        std::string label = eq == std::string::npos ? "" : spec.substr(0, eq);
        fs::path file = eq == std::string::npos ? spec : spec.substr(eq + 1);
        if (label.empty()) {
            label = file.filename().string();
            if (label.ends_with(".lgpt.md")) label.resize(label.size() - 8);
        }
        variants.push_back({label, doc::parse(read_text(file))});
    }
    auto reg = make_registry(c.g);
    auto factory = make_factory(c.g);
    auto gw = factory->create();
    auto report = orchestrator::compare_prompts(brief, variants, probes, reg, *gw, !factory->offline());
    auto j = orchestrator::to_json(report);
    if (!output.empty()) write_text(output, j.dump(2) + "\n");
    if (c.g.json) {
        c.out << j.dump(2) << "\n";
    } else {
        int rank = 1;
        for (const auto& label : report.ranking) {
            const auto& v = *std::find_if(report.variants.begin(), report.variants.end(),
                                          [&](const auto& r) { return r.label == label; });
            c.out << rank++ << ". " << label << "  mean " << score_text(v.mean_score);
            if (v.error) c.out << "  error: " << *v.error;
            c.out << "\n";
        }
    }
    bool all_failed = std::all_of(report.variants.begin(), report.variants.end(), [](const auto& v) { return v.error.has_value(); });
    return all_failed ? kAgent : kOk;
}

int cmd_save(Ctx& c, const std::string& path) {
    auto stored = open_store(c.g).save(doc::parse(read_text(path)));
    if (c.g.json) {
        c.out << json{{"id", stored.id}, {"version", stored.version}, {"created_at", stored.created_at},
                      {"parent_version", stored.parent_version ? json(*stored.parent_version) : json(nullptr)}}
                     .dump(2)
              << "\n";
    } else {
        c.out << "saved " << stored.id << " " << stored.version << "\n";
    }
    return kOk;
}

int cmd_get(Ctx& c, const std::string& id, const std::string& version, const std::string& output, bool flat) {
    auto p = open_store(c.g).get(id, version.empty() ? std::nullopt : std::optional<std::string>(version));
    auto text = flat ? doc::render_flat(p.document) : doc::render(p.document);
    if (output.empty()) {
        c.out << text;
    } else {
        write_text(output, text);
    }
    return kOk;
}

int cmd_list(Ctx& c, const std::string& filter) {
    auto entries = open_store(c.g).list(filter.empty() ? std::nullopt : std::optional<std::string>(filter));
    if (c.g.json) {
        json arr = json::array();
        for (const auto& e : entries) arr.push_back({{"id", e.id}, {"latest_version", e.latest_version}, {"role_name", e.role_name}});
        c.out << json{{"prompts", arr}}.dump(2) << "\n";
    } else {
        for (const auto& e : entries) c.out << e.id << "\t" << e.latest_version << "\t" << e.role_name << "\n";
    }
    return kOk;
}

int cmd_serve(Ctx& c, const std::string& host, int port, const std::string& ui_dir) {
    auto reg = make_registry(c.g);
    service::ServiceOptions opts;
    opts.store = std::make_shared<store::PromptStore>(open_store(c.g).root());
    if (!ui_dir.empty()) opts.ui_dir = ui_dir;
    else if (fs::is_directory("ui")) opts.ui_dir = "ui";

    sigset_t sigs;
    sigemptyset(&sigs);
    sigaddset(&sigs, SIGINT);
    sigaddset(&sigs, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &sigs, nullptr);

    service::Service svc(reg, make_factory(c.g), opts);
    int bound = svc.bind(host, port);
    c.out << "listening on http://" << host << ":" << bound << (c.g.mock.empty() ? "" : " (mock gateway)") << "\n"
          << std::flush;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&sigs, &sig);
        svc.stop();
    });
    svc.listen();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

// ---- wiring ---------------------------------------------------------------

struct App {
    CLI::App app{"Structural prompt authoring: LangGPT documents and a multi-agent generate-test-reflect loop",
                 "minstrel"};
    Globals g;

    std::vector<std::string> files;
    std::string file, output, module, host = "127.0.0.1", ui_dir, id, version, filter;
    bool to_stdout = false, check = false, canonical = false, save = false, flat = false;
    int port = 8080;
    GenerateOpts gen;
    std::vector<std::string> comments, variants, probes;
    std::string task, domain, language = "English";

    CLI::App* lint;
    CLI::App* fmt;
    CLI::App* render;
    CLI::App* generate;
    CLI::App* test;
    CLI::App* comment;
    CLI::App* reflect;
    CLI::App* refine;
    CLI::App* finalize;
    CLI::App* show;
    CLI::App* compare;
    CLI::App* serve;
    CLI::App* save_cmd;
    CLI::App* get;
    CLI::App* list;

    App() {
        app.fallthrough();
        app.require_subcommand(1);
        app.add_option("--mock", g.mock, "Route every gateway call to a scripted fixture pack (file or directory)");
        app.add_option("--agents", g.agents_dir, "Directory of agent meta-prompts overriding the built-in ones");
        app.add_option("--endpoints", g.endpoints, "Endpoint config JSON (default: $MINSTREL_ENDPOINTS)");
        app.add_option("--store", g.store, "Prompt store directory (default: $MINSTREL_STORE or ./minstrel-store)");
        app.add_flag("--json", g.json, "Machine-readable output");

        lint = app.add_subcommand("lint", "Lint prompt files; exit 1 on errors, 3 on parse errors");
        lint->add_option("files", files, "Prompt files")->required()->check(CLI::ExistingFile);

        fmt = app.add_subcommand("fmt", "Rewrite a prompt file in canonical form");
        fmt->add_option("file", file)->required()->check(CLI::ExistingFile);
        fmt->add_flag("--stdout", to_stdout, "Print instead of rewriting");
        fmt->add_flag("--check", check, "Exit 1 when the file is not canonical");

        render = app.add_subcommand("render", "Print the flat prompt text for pasting into a chat");
        render->add_option("file", file)->required()->check(CLI::ExistingFile);
        render->add_flag("--canonical", canonical, "Print the canonical markup instead");

        auto add_brief = [this](CLI::App* sub) {
            sub->add_option("--task", task, "Task description")->required();
            sub->add_option("--domain", domain, "Domain hint");
            sub->add_option("--language", language, "Output language")->capture_default_str();
        };

        generate = app.add_subcommand("generate", "Design, test and refine a prompt for a task");
        add_brief(generate);
        generate->add_flag("--interactive", gen.config.interactive, "Ask for comments after each test pass");
        generate->add_option("--max-reflections", gen.config.max_reflections)->capture_default_str()->check(CLI::NonNegativeNumber);
        generate->add_option("--test-turns", gen.config.test_turns)->capture_default_str()->check(CLI::PositiveNumber);
        generate->add_option("--accept-score", gen.accept_score, "Finalize once the mean commentator score reaches this")
            ->check(CLI::Range(1.0, 10.0));
        generate->add_flag("--design-only", gen.design_only, "Stop after the design pass");
        generate->add_option("-o,--output", gen.output, "Prompt file to write (default: <role>.lgpt.md; - for stdout)");
        generate->add_option("--session-out", gen.session_out, "Write the session record here");
        generate->add_option("--transcript", gen.transcript, "Write the gateway exchange log (JSONL) here");
        generate->add_flag("--save", gen.save, "Save the final prompt to the store");

        test = app.add_subcommand("test", "Run a test pass on a session file");
        test->add_option("session", file)->required()->check(CLI::ExistingFile);

        comment = app.add_subcommand("comment", "Add user comments to a session file");
        comment->add_option("session", file)->required()->check(CLI::ExistingFile);
        comment->add_option("--comment", comments, "Comment text (repeatable)")->required();
        comment->add_option("--module", module, "Module the comments are about");

        reflect = app.add_subcommand("reflect", "Run a reflection pass on a session file");
        reflect->add_option("session", file)->required()->check(CLI::ExistingFile);
        reflect->add_option("-o,--output", output, "Write the prompt here if the session finalizes");

        refine = app.add_subcommand("refine", "Add comments, then reflect and continue a session file");
        refine->add_option("session", file)->required()->check(CLI::ExistingFile);
        refine->add_option("--comment", comments, "Comment text (repeatable)")->required();
        refine->add_option("--module", module, "Module the comments are about");
        refine->add_option("-o,--output", output, "Write the prompt here if the session finalizes");

        finalize = app.add_subcommand("finalize", "Print or write the final prompt of a session file");
        finalize->add_option("session", file)->required()->check(CLI::ExistingFile);
        finalize->add_option("-o,--output", output, "Prompt file to write (default: stdout)");
        finalize->add_flag("--save", save, "Also save it to the store");

        show = app.add_subcommand("show", "Summarize a session file");
        show->add_option("session", file)->required()->check(CLI::ExistingFile);

        compare = app.add_subcommand("compare", "Compare prompt variants on the same probes");
        add_brief(compare);
        compare->add_option("--variants", variants,
                            "instruction-only, crispe, costar, a prompt file, or label=file")
            ->required()
            ->expected(2, -1);
        compare->add_option("--probe", probes, "User message sent to every variant (repeatable)")->required();
        compare->add_option("-o,--output", output, "Write the JSON report here");

        serve = app.add_subcommand("serve", "Run the HTTP API");
        serve->add_option("--host", host)->capture_default_str();
        serve->add_option("--port", port)->capture_default_str();
        serve->add_option("--ui-dir", ui_dir, "Static studio assets served at /ui");

        save_cmd = app.add_subcommand("save", "Save a prompt file to the store");
        save_cmd->add_option("file", file)->required()->check(CLI::ExistingFile);

        get = app.add_subcommand("get", "Print a stored prompt");
        get->add_option("id", id)->required();
        get->add_option("--version", version, "Exact version (default: latest)");
        get->add_option("-o,--output", output);
        get->add_flag("--flat", flat, "Flat rendering");

        list = app.add_subcommand("list", "List stored prompts");
        list->add_option("--filter", filter, "Substring of id or role name");
    }

    agents::TaskBrief brief() const {
        return {task, domain.empty() ? std::nullopt : std::optional<std::string>(domain), language};
    }

    int dispatch(Ctx& c) {
        if (*lint) return cmd_lint(c, files);
        if (*fmt) return cmd_fmt(c, file, to_stdout, check);
        if (*render) return cmd_render(c, file, canonical);
        if (*generate) {
            gen.brief = brief();
            return cmd_generate(c, gen);
        }
        if (*test) return cmd_session_step(c, Step::Test, file, {}, "", "");
        if (*comment) return cmd_session_step(c, Step::Comment, file, comments, module, "");
        if (*reflect) return cmd_session_step(c, Step::Reflect, file, {}, "", output);
        if (*refine) return cmd_session_step(c, Step::Refine, file, comments, module, output);
        if (*finalize) return cmd_finalize(c, file, output, save);
        if (*show) return cmd_show(c, file);
        if (*compare) return cmd_compare(c, brief(), variants, probes, output);
        if (*serve) return cmd_serve(c, host, port, ui_dir);
        if (*save_cmd) return cmd_save(c, file);
        if (*get) return cmd_get(c, id, version, output, flat);
        if (*list) return cmd_list(c, filter);
        return kUsage;
    }
};

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingRole:
        case ErrorCode::DuplicateModule:
        case ErrorCode::MalformedHeading:
        case ErrorCode::EmptySlot:
        case ErrorCode::AmbiguousSlot:
        case ErrorCode::NoActions:
        case ErrorCode::InvalidElement: return kParse;
        case ErrorCode::Transport:
        case ErrorCode::Timeout:
        case ErrorCode::RetriesExhausted:
        case ErrorCode::EmptyCompletion:
        case ErrorCode::AmbiguousFixture:
        case ErrorCode::InvalidRequest:
        case ErrorCode::SchemaViolation:
        case ErrorCode::UnknownModuleName:
        case ErrorCode::WrongModuleKind:
        case ErrorCode::StanceMultisetViolation: return kAgent;
        case ErrorCode::PreconditionViolation:
        case ErrorCode::InvalidState:
        case ErrorCode::SessionNotAwaitingInput:
        case ErrorCode::NotFinalized: return kState;
        case ErrorCode::LintErrors: return kLintErrors;
        case ErrorCode::VersionConflict:
        case ErrorCode::NotFound: return kStore;
        case ErrorCode::Io: return kIo;
        case ErrorCode::InvalidConfig:
        case ErrorCode::Validation: return kUsage;
    }
    return kUsage;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    App a;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        a.app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = a.app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    }
    Ctx c{a.g, in, out, err};
    try {
        return a.dispatch(c);
    } catch (const Error& e) {
        if (a.g.json) c.out << json{{"error", {{"code", e.code_name()}, {"message", e.what()}}}}.dump(2) << "\n";
        c.err << "error: " << e.code_name() << ": " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        c.err << "error: " << e.what() << "\n";
        return kIo;
    }
}

std::vector<std::string> subcommand_names() {
    App a;
    std::vector<std::string> out;
    for (const auto* sub : a.app.get_subcommands({})) out.push_back(sub->get_name());
    return out;
}

}  // namespace minstrel::cli
