#include "sgforge/service.hpp"

#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "sgforge/errors.hpp"
#include "sgforge/jobs.hpp"
#include "sgforge/registry.hpp"

namespace sgforge {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string version_token(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[i] = kHex[h & 0xf];
    return out;
}

bool valid_scenario_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

namespace {

constexpr int kSchemaVersion = 1;

std::optional<std::string> read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_atomically(const fs::path& file, std::string_view bytes) {
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, file);
}

ordered_json envelope() { return ordered_json{{"schema_version", kSchemaVersion}}; }

// Each JSON line of a job payload becomes one array element, so the array is
// exactly what the command line prints with --format json.
ordered_json jsonl_array(const std::string& jsonl) {
    auto out = ordered_json::array();
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(ordered_json::parse(line));
    }
    return out;
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
    res.status = status;
    res.set_content(body.dump() + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::vector<Diagnostic>& diagnostics = {}) {
    auto body = envelope();
    body["error"] = message;
    body["diagnostics"] = jsonl_array(diagnostics_to_jsonl(diagnostics));
    send_json(res, status, body);
}

std::string strip_quotes(std::string s) {
    if (s.starts_with("W/")) s.erase(0, 2);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::optional<std::size_t> size_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    const auto text = req.get_param_value(key);
    std::size_t pos = 0;
    const auto value = std::stoull(text, &pos);
    if (pos != text.size()) throw InvalidArgument(std::string("query parameter ") + key + " must be an integer");
    return static_cast<std::size_t>(value);
}

ordered_json activity_json(const ActivityDescriptor& a) {
    return {{"id", a.id},           {"name", a.name}, {"grain", to_string(a.grain)},
            {"kind", a.kind},       {"use", a.use_characteristics},
            {"objectives", a.objectives_addressed}};
}

ordered_json editor_json(const EditorDescriptor& e) {
    return {{"id", e.id},
            {"name", e.name},
            {"kinds", e.applicable_kinds},
            {"adaptation", to_string(e.adaptation_level)},
            {"min_knowledge", to_string(e.min_programming_knowledge)}};
}

ActivityDescriptor activity_from_json(const nlohmann::json& j) {
    ActivityDescriptor a;
    a.id = j.at("id").get<std::string>();
    a.name = j.value("name", "");
    const auto grain_text = j.at("grain").get<std::string>();
    auto grain = parse_grain(grain_text);
    if (!grain) throw InvalidArgument("unknown grain '" + grain_text + "'");
    a.grain = *grain;
    a.kind = j.value("kind", "");
    a.use_characteristics = j.value("use", "");
    a.objectives_addressed = j.value("objectives", std::vector<std::string>{});
    return a;
}

EditorDescriptor editor_from_json(const nlohmann::json& j) {
    EditorDescriptor e;
    e.id = j.at("id").get<std::string>();
    e.name = j.value("name", "");
    e.applicable_kinds = j.value("kinds", std::vector<std::string>{});
    const auto adaptation_text = j.value("adaptation", "interface-only");
    auto adaptation = parse_adaptation_level(adaptation_text);
    if (!adaptation) throw InvalidArgument("unknown adaptation level '" + adaptation_text + "'");
    e.adaptation_level = *adaptation;
    const auto knowledge_text = j.value("min_knowledge", "none");
    auto knowledge = parse_programming_knowledge(knowledge_text);
    if (!knowledge) throw InvalidArgument("unknown programming knowledge '" + knowledge_text + "'");
    e.min_programming_knowledge = *knowledge;
    return e;
}

constexpr const char* kPlaceholderPage =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>sgforge</title></head>\n"
    "<body><h1>sgforge service</h1><p>No editor assets installed. API under /api/.</p></body></html>\n";

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    ActivityRegistry registry;
    std::mutex registry_write;
    std::mutex locks_guard;
    std::map<std::string, std::shared_ptr<std::mutex>> locks;

    fs::path scenarios_dir() const { return options.store / "scenarios"; }
    fs::path scenario_file(const std::string& id) const { return scenarios_dir() / (id + ".xml"); }
    fs::path registry_file() const { return options.store / "registry.xml"; }

    std::shared_ptr<std::mutex> lock_for(const std::string& id) {
        std::scoped_lock lock(locks_guard);
        auto& slot = locks[id];
        if (!slot) slot = std::make_shared<std::mutex>();
        return slot;
    }

    // Resolves the {id} path parameter; answers 400/404 itself when it fails.
    std::optional<std::string> stored(const httplib::Request& req, httplib::Response& res, std::string* id_out) {
        const auto id = req.path_params.at("id");
        if (!valid_scenario_id(id)) {
            send_error(res, 400, "invalid scenario id '" + id + "'");
            return std::nullopt;
        }
        if (id_out) *id_out = id;
        auto bytes = read_file(scenario_file(id));
        if (!bytes) send_error(res, 404, "unknown scenario '" + id + "'");
        return bytes;
    }

    void routes();
};

void Service::Impl::routes() {
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
        res.set_header("X-Schema-Version", std::to_string(kSchemaVersion));
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "internal error");
        }
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return;
        send_error(res, res.status, res.status == 404 ? "not found" : "request failed");
    });

    server.Get("/api/scenarios", [this](const httplib::Request&, httplib::Response& res) {
        auto body = envelope();
        auto items = ordered_json::array();
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(scenarios_dir())) {
            if (entry.path().extension() == ".xml") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            if (auto bytes = read_file(file)) {
                items.push_back({{"id", file.stem().string()}, {"version", version_token(*bytes)}});
            }
        }
        body["scenarios"] = std::move(items);
        send_json(res, 200, body);
    });

    server.Get("/api/scenarios/:id", [this](const httplib::Request& req, httplib::Response& res) {
        auto bytes = stored(req, res, nullptr);
        if (!bytes) return;
        res.set_header("ETag", "\"" + version_token(*bytes) + "\"");
        res.set_content(*bytes, "application/xml");
    });

    server.Put("/api/scenarios/:id", [this](const httplib::Request& req, httplib::Response& res) {
        const auto id = req.path_params.at("id");
        if (!valid_scenario_id(id)) return send_error(res, 400, "invalid scenario id '" + id + "'");
        const auto loaded = load_scenario_document(req.body);
        if (loaded.kind != DocumentKind::Canonical || !loaded.scenario) {
            auto diags = loaded.diagnostics;
            if (loaded.kind != DocumentKind::Canonical) {
                diags.push_back(make_diagnostic(codes::kUnreadableDocument, std::nullopt,
                                                "expected a canonical <scenario> document"));
                sort_diagnostics(diags);
            }
            return send_error(res, 400, "malformed scenario document", diags);
        }
        auto mutex = lock_for(id);
        std::scoped_lock lock(*mutex);
        const auto current = read_file(scenario_file(id));
        const auto presented = req.has_header("If-Match") ? std::optional(strip_quotes(req.get_header_value("If-Match")))
                                                          : std::nullopt;
        if (current) {
            const auto token = version_token(*current);
            if (!presented) return send_error(res, 409, "version token required to overwrite '" + id + "'");
            if (*presented != token && *presented != "*") {
                return send_error(res, 409, "stale version token for '" + id + "'");
            }
        } else if (presented && *presented != "*") {
            return send_error(res, 409, "scenario '" + id + "' does not exist at that version");
        }
        write_atomically(scenario_file(id), req.body);
        const auto token = version_token(req.body);
        auto body = envelope();
        body["id"] = id;
        body["version"] = token;
        body["diagnostics"] = jsonl_array(diagnostics_to_jsonl(loaded.diagnostics));
        res.set_header("ETag", "\"" + token + "\"");
        send_json(res, current ? 200 : 201, body);
    });

    server.Post("/api/scenarios/:id/validate", [this](const httplib::Request& req, httplib::Response& res) {
        auto bytes = stored(req, res, nullptr);
        if (!bytes) return;
        ValidateOptions options;
        try {
            if (auto v = size_param(req, "max_paths")) options.limits.max_paths = *v;
            if (auto v = size_param(req, "max_cycle_unrolls")) options.limits.max_cycle_unrolls = *v;
        } catch (const std::exception& e) {
            return send_error(res, 400, e.what());
        }
        const auto result = run_validate(*bytes, options);
        auto body = envelope();
        body["kind"] = "validate";
        body["version"] = version_token(*bytes);
        body["exit_code"] = result.exit_code;
        body["diagnostics"] = jsonl_array(diagnostics_to_jsonl(result.diagnostics));
        send_json(res, 200, body);
    });

    server.Post("/api/scenarios/:id/paths", [this](const httplib::Request& req, httplib::Response& res) {
        auto bytes = stored(req, res, nullptr);
        if (!bytes) return;
        PathLimits limits;
        try {
            if (auto v = size_param(req, "max_paths")) limits.max_paths = *v;
            if (auto v = size_param(req, "max_cycle_unrolls")) limits.max_cycle_unrolls = *v;
        } catch (const std::exception& e) {
            return send_error(res, 400, e.what());
        }
        const auto result = run_paths(*bytes, limits);
        auto body = envelope();
        body["kind"] = "paths";
        body["exit_code"] = result.exit_code;
        body["diagnostics"] = jsonl_array(diagnostics_to_jsonl(result.diagnostics));
        body["records"] = result.paths ? jsonl_array(paths_to_jsonl(*result.paths)) : ordered_json::array();
        send_json(res, 200, body);
    });

    server.Post("/api/scenarios/:id/simulate", [this](const httplib::Request& req, httplib::Response& res) {
        auto bytes = stored(req, res, nullptr);
        if (!bytes) return;
        SimulateOptions options;
        options.threads = this->options.simulation_threads;
        options.max_players = this->options.max_players;
        options.max_steps_cap = this->options.max_steps;
        try {
            if (auto v = size_param(req, "seed")) options.seed = *v;
            if (auto v = size_param(req, "max_steps")) options.max_steps = *v;
        } catch (const std::exception& e) {
            return send_error(res, 400, e.what());
        }
        const auto result = run_simulate(*bytes, req.body, options);
        if (result.exit_code == exit_codes::kUsage) return send_error(res, 400, result.message.value_or("bad request"));
        auto body = envelope();
        body["kind"] = "simulate";
        body["exit_code"] = result.exit_code;
        body["diagnostics"] = jsonl_array(diagnostics_to_jsonl(result.diagnostics));
        body["report"] = result.report ? ordered_json::parse(report_to_json(*result.report)) : ordered_json(nullptr);
        body["records"] = result.report ? jsonl_array(gain_summary_jsonl(*result.report)) : ordered_json::array();
        send_json(res, 200, body);
    });

    server.Get("/api/registry/activities", [this](const httplib::Request& req, httplib::Response& res) {
        ActivityFilter filter;
        if (req.has_param("grain")) {
            const auto text = req.get_param_value("grain");
            filter.grain = parse_grain(text);
            if (!filter.grain) return send_error(res, 400, "unknown grain '" + text + "'");
        }
        if (req.has_param("kind")) filter.kind = req.get_param_value("kind");
        auto items = ordered_json::array();
        for (const auto& a : registry.list_activities(filter)) items.push_back(activity_json(a));
        auto body = envelope();
        body["activities"] = std::move(items);
        send_json(res, 200, body);
    });

    server.Get("/api/registry/editors", [this](const httplib::Request& req, httplib::Response& res) {
        ExpertProfile expert{ProgrammingKnowledge::Programmer, AdaptationLevel::InterfaceOnly};
        if (req.has_param("knowledge")) {
            const auto text = req.get_param_value("knowledge");
            auto k = parse_programming_knowledge(text);
            if (!k) return send_error(res, 400, "unknown programming knowledge '" + text + "'");
            expert.programming_knowledge = *k;
        }
        if (req.has_param("adaptation")) {
            const auto text = req.get_param_value("adaptation");
            auto a = parse_adaptation_level(text);
            if (!a) return send_error(res, 400, "unknown adaptation level '" + text + "'");
            expert.desired_adaptation = *a;
        }
        std::vector<EditorDescriptor> editors;
        if (req.has_param("kind")) {
            editors = registry.find_editors(req.get_param_value("kind"), expert);
        } else {
            for (auto& e : registry.list_editors()) {
                if (e.min_programming_knowledge <= expert.programming_knowledge) editors.push_back(std::move(e));
            }
        }
        auto items = ordered_json::array();
        for (const auto& e : editors) items.push_back(editor_json(e));
        auto body = envelope();
        body["editors"] = std::move(items);
        send_json(res, 200, body);
    });

    auto register_route = [this](auto convert, const char* what) {
        return [this, convert, what](const httplib::Request& req, httplib::Response& res) {
            std::string id;
            try {
                auto descriptor = convert(nlohmann::json::parse(req.body));
                std::scoped_lock lock(registry_write);
                ActivityRegistry next = registry;
                id = [&] {
                    if constexpr (std::is_same_v<decltype(descriptor), ActivityDescriptor>) {
                        return next.register_activity(std::move(descriptor));
                    } else {
                        return next.register_editor(std::move(descriptor));
                    }
                }();
                next.save(registry_file());
                registry = next;
            } catch (const DuplicateId& e) {
                return send_error(res, 409, e.what());
            } catch (const InvalidArgument& e) {
                return send_error(res, 400, e.what());
            } catch (const nlohmann::json::exception& e) {
                return send_error(res, 400, std::string("malformed ") + what + ": " + e.what());
            }
            auto body = envelope();
            body["id"] = id;
            send_json(res, 201, body);
        };
    };
    server.Post("/api/registry/activities", register_route(activity_from_json, "activity"));
    server.Post("/api/registry/editors", register_route(editor_from_json, "editor"));

    if (options.ui_dir && fs::is_directory(*options.ui_dir)) {
        server.set_mount_point("/", options.ui_dir->string());
    } else {
        server.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
        });
    }
}

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
    impl_->options = std::move(options);
    std::error_code ec;
    fs::create_directories(impl_->scenarios_dir(), ec);
    if (ec) throw Error("cannot create store " + impl_->scenarios_dir().string() + ": " + ec.message());
    impl_->registry = ActivityRegistry::load(impl_->registry_file());
    impl_->routes();
}

Service::~Service() = default;

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace sgforge
