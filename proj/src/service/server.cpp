#include "minstrel/service/server.hpp"

#include "minstrel/agents/json.hpp"
#include "minstrel/doc/diff.hpp"
#include "minstrel/doc/grammar.hpp"
#include "minstrel/doc/lint.hpp"
#include "minstrel/orchestrator/compare.hpp"

#include <httplib.h>

#include <regex>
#include <stdexcept>

namespace minstrel::service {

using nlohmann::json;
using orchestrator::StateKind;

namespace {

using Handler = std::function<json(const httplib::Request&, httplib::Response&)>;

[[noreturn]] void bad_request(const std::string& why) { throw Error(ErrorCode::Validation, why); }

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) bad_request("request body must be a JSON object");
        return j;
    } catch (const json::parse_error&) {
        bad_request("request body is not valid JSON");
    }
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, const ApiError& e, const json& extra = json::object()) {
    auto body = to_json(e);
    for (const auto& [k, v] : extra.items()) body[k] = v;
    send_json(res, e.http_status, body);
}

std::string text_field(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) bad_request(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
}

doc::PromptDocument parse_text(const std::string& text) { return doc::parse(text); }

std::vector<agents::Comment> comments_from(const json& body) {
    if (!body.contains("comments") || !body["comments"].is_array()) bad_request("'comments' must be an array");
    std::vector<agents::Comment> out;
    for (const auto& c : body["comments"]) {
        if (c.is_string()) {
            out.push_back(agents::user_comment(c.get<std::string>()));
            continue;
        }
        if (!c.is_object()) bad_request("each comment is a string or {\"text\", \"module\"?}");
        std::optional<doc::NamedModule> hint;
        if (c.contains("module") && !c["module"].is_null()) {
            if (!c["module"].is_string()) bad_request("'module' must be a string");
            hint = doc::lookup_named_module(c["module"].get<std::string>());
            if (!hint) bad_request("unknown module '" + c["module"].get<std::string>() + "'");
        }
        out.push_back(agents::user_comment(text_field(c, "text"), hint));
    }
    return out;
}

json stored_json(const store::StoredPrompt& p) {
    return {{"id", p.id},
            {"version", p.version},
            {"role_name", p.document.role_name()},
            {"created_at", p.created_at},
            {"parent_version", p.parent_version ? json(*p.parent_version) : json(nullptr)}};
}

/// "{id}" placeholders become one-segment capture groups.
std::string route_pattern(std::string_view path) {
    return std::regex_replace(std::string(path), std::regex(R"(\{id\})"), "([^/]+)");
}

}  // namespace

json session_view(const orchestrator::SessionRecord& s) {
    auto view = orchestrator::to_json(s);
    json panels = json::array();
    for (std::size_t i = 0; i < s.drafts.size(); ++i) {
        json modules = json::array();
        for (const auto* b : s.drafts[i].canonical_blocks()) {
            modules.push_back({{"kind", b->kind.name()}, {"text", doc::render_block(*b)}});
        }
        json changed = json::array();
        if (i > 0) {
            for (const auto& k : doc::diff(s.drafts[i - 1], s.drafts[i])) changed.push_back(k.name());
        }
        panels.push_back({{"index", i}, {"modules", modules}, {"changed", changed}});
    }
    view["draft_panels"] = panels;
    view["iteration"] = s.reflections_done();
    auto mean = s.latest_mean_score();
    view["latest_mean_score"] = mean ? json(*mean) : json(nullptr);
    return view;
}

Service::Service(const agents::AgentRegistry& registry, std::shared_ptr<const gateway::GatewayFactory> factory,
                 ServiceOptions options)
    : registry_(registry),
      factory_(factory),
      options_(std::move(options)),
      sessions_(registry, factory),
      server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
    if (server_) server_->stop();
}

void Service::wait_until_ready() { server_->wait_until_ready(); }

void Service::install_routes() {
    std::map<std::pair<std::string, std::string>, Handler> handlers;
    auto on = [&](std::string method, std::string path, Handler h) {
        handlers[{std::move(method), std::move(path)}] = std::move(h);
    };
    auto session_of = [this](const httplib::Request& req) { return sessions_.get(req.matches[1]); };
    auto persist = [this](const orchestrator::Session& s) {
        if (options_.store) options_.store->put_session(s.id(), orchestrator::to_json(s.snapshot()));
    };
    // Runs a session mutation; a transition into Failed answers 502 with the cause.
    auto mutate = [persist](std::shared_ptr<orchestrator::Session> s, httplib::Response& res,
                            const std::function<void()>& op, int ok_status = 200) -> json {
        op();
        persist(*s);
        auto snap = s->snapshot();
        auto view = session_view(snap);
        if (snap.state.kind == StateKind::Failed) {
            auto sep = snap.state.reason.find(": ");
            ApiError e{snap.state.reason.substr(0, sep),
                       sep == std::string::npos ? snap.state.reason : snap.state.reason.substr(sep + 2), 502};
            send_error(res, e, {{"session", view}});
            return nullptr;
        }
        res.status = ok_status;
        return view;
    };

    on("POST", "/sessions", [this, mutate](const httplib::Request& req, httplib::Response& res) -> json {
        auto body = body_of(req);
        if (!body.contains("brief")) bad_request("'brief' is required");
        auto brief = agents::brief_from_json(body["brief"]);
        auto config = body.contains("config") ? orchestrator::config_from_json(body["config"])
                                              : orchestrator::SessionConfig{};
        auto session = sessions_.create(brief, config);
        return mutate(session, res, [] {}, 201);
    });
    on("GET", "/sessions", [this](const httplib::Request&, httplib::Response&) -> json {
        return {{"sessions", sessions_.ids()}};
    });
    on("GET", "/sessions/{id}", [session_of](const httplib::Request& req, httplib::Response&) -> json {
        return session_view(session_of(req)->snapshot());
    });
    on("POST", "/sessions/{id}/test", [session_of, mutate](const httplib::Request& req, httplib::Response& res) {
        auto s = session_of(req);
        return mutate(s, res, [&] { s->run_test_pass(); });
    });
    on("POST", "/sessions/{id}/comments", [session_of, mutate](const httplib::Request& req, httplib::Response& res) {
        auto s = session_of(req);
        auto comments = comments_from(body_of(req));
        return mutate(s, res, [&] { s->submit_user_comments(comments); });
    });
    on("POST", "/sessions/{id}/reflect", [session_of, mutate](const httplib::Request& req, httplib::Response& res) {
        auto s = session_of(req);
        return mutate(s, res, [&] { s->run_reflection_pass(); });
    });
    on("POST", "/sessions/{id}/finalize", [this, session_of](const httplib::Request& req, httplib::Response&) -> json {
        auto s = session_of(req);
        auto body = body_of(req);
        auto document = s->finalize();
        json out = {{"session_id", s->id()},
                    {"role_name", document.role_name()},
                    {"document", doc::render(document)},
                    {"flat", doc::render_flat(document)}};
        if (body.value("save", false)) {
            if (!options_.store) throw Error(ErrorCode::Validation, "the service has no prompt store");
            out["stored"] = stored_json(options_.store->save(document));
        }
        return out;
    });
    on("GET", "/prompts", [this](const httplib::Request& req, httplib::Response&) -> json {
        if (!options_.store) return {{"prompts", json::array()}};
        std::optional<std::string> filter;
        if (req.has_param("filter")) filter = req.get_param_value("filter");
        json list = json::array();
        for (const auto& e : options_.store->list(filter)) {
            list.push_back({{"id", e.id}, {"latest_version", e.latest_version}, {"role_name", e.role_name}});
        }
        return {{"prompts", list}};
    });
    on("POST", "/prompts", [this](const httplib::Request& req, httplib::Response& res) -> json {
        if (!options_.store) throw Error(ErrorCode::Validation, "the service has no prompt store");
        auto stored = options_.store->save(parse_text(text_field(body_of(req), "text")));
        res.status = 201;
        return stored_json(stored);
    });
    on("GET", "/prompts/{id}", [this](const httplib::Request& req, httplib::Response&) -> json {
        if (!options_.store) throw Error(ErrorCode::NotFound, "no prompt '" + std::string(req.matches[1]) + "'");
        std::optional<std::string> version;
        if (req.has_param("version")) version = req.get_param_value("version");
        auto p = options_.store->get(req.matches[1], version);
        auto out = stored_json(p);
        out["document"] = doc::render(p.document);
        out["flat"] = doc::render_flat(p.document);
        out["versions"] = options_.store->versions(p.id);
        return out;
    });
    on("POST", "/lint", [](const httplib::Request& req, httplib::Response&) -> json {
        auto d = parse_text(text_field(body_of(req), "text"));
        auto out = to_json(doc::lint(d));
        out["canonical"] = doc::render(d);
        return out;
    });
    on("POST", "/compare", [this](const httplib::Request& req, httplib::Response&) -> json {
        auto body = body_of(req);
        if (!body.contains("brief")) bad_request("'brief' is required");
        auto brief = agents::brief_from_json(body["brief"]);
        if (!body.contains("variants") || !body["variants"].is_array()) bad_request("'variants' must be an array");
        std::vector<orchestrator::Variant> variants;
        for (const auto& v : body["variants"]) {
            if (!v.is_object()) bad_request("each variant is an object");
            auto label = text_field(v, "label");
            if (v.contains("baseline")) {
                variants.push_back({label, orchestrator::parse_baseline(text_field(v, "baseline"))});
            } else {
                variants.push_back({label, parse_text(text_field(v, "text"))});
            }
        }
        if (!body.contains("probes") || !body["probes"].is_array()) bad_request("'probes' must be an array");
        std::vector<std::string> probes;
        for (const auto& p : body["probes"]) {
            if (!p.is_string()) bad_request("probes must be strings");
            probes.push_back(p.get<std::string>());
        }
        auto gw = factory_->create();
        return orchestrator::to_json(orchestrator::compare_prompts(brief, variants, probes, registry_, *gw,
                                                                   body.value("parallel", !factory_->offline())));
    });

    for (const auto& cmd : api_commands()) {
        auto it = handlers.find({std::string(cmd.method), std::string(cmd.path)});
        if (it == handlers.end()) {
            throw std::logic_error("no handler for " + std::string(cmd.method) + " " + std::string(cmd.path));
        }
        auto wrapped = [h = it->second](const httplib::Request& req, httplib::Response& res) {
            try {
                auto body = h(req, res);
                if (!body.is_null()) send_json(res, res.status == -1 ? 200 : res.status, body);
            } catch (const Error& e) {
                send_error(res, to_api_error(e));
            } catch (const json::exception& e) {
                send_error(res, {"Validation", std::string("malformed request: ") + e.what(), 400});
            } catch (const std::exception&) {
                send_error(res, {"Internal", "internal error", 500});
            }
        };
        auto pattern = route_pattern(cmd.path);
        if (cmd.method == "GET") {
            server_->Get(pattern, wrapped);
        } else {
            server_->Post(pattern, wrapped);
        }
        handlers.erase(it);
    }
    if (!handlers.empty()) throw std::logic_error("handler without an api_commands entry");

    if (options_.ui_dir && std::filesystem::is_directory(*options_.ui_dir)) {
        server_->set_mount_point("/ui", options_.ui_dir->string());
    } else {
        server_->Get(R"(/ui(/.*)?)", [](const httplib::Request&, httplib::Response& res) {
            send_error(res, {"NotFound", "UI assets are not installed", 404});
        });
    }
    server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            send_error(res, {res.status == 404 ? "NotFound" : "Validation",
                             "no route for " + req.method + " " + req.path, res.status});
        }
    });
}

}  // namespace minstrel::service
