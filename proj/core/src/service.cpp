#include "aptly/service.hpp"

#include "aptly/blocks.hpp"
#include "aptly/parser.hpp"
#include "aptly/pipeline.hpp"
#include "aptly/printer.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

namespace {

json span_json(const SourceSpan& s) { return {{"line", s.line}, {"column", s.column}, {"length", s.length}}; }

json diags_value(const Diagnostics& diags) {
  json arr = json::array();
  for (const auto& d : diags) {
    arr.push_back({{"code", code_name(d.code)},
                   {"message", d.message},
                   {"severity", d.severity == Severity::Error ? "error" : "warning"},
                   {"span", span_json(d.span)}});
  }
  return arr;
}

json summary_value(const Program& p) {
  json components = json::array();
  for (const auto& c : p.components) {
    components.push_back({{"name", c.name}, {"type", c.type_name}, {"parent", c.parent ? json(*c.parent) : json()}});
  }
  json globals = json::array();
  for (const auto& g : p.globals) globals.push_back(g.name);
  json procedures = json::array();
  for (const auto& pr : p.procedures) {
    procedures.push_back({{"name", pr.name}, {"params", pr.params}, {"has_result", pr.has_result()}});
  }
  json handlers = json::array();
  for (const auto& h : p.handlers) handlers.push_back({{"component", h.component}, {"event", h.event}});
  return {{"components", components}, {"globals", globals}, {"procedures", procedures}, {"handlers", handlers}};
}

HttpResponse reply(int status, const json& body) { return HttpResponse{status, body.dump() + "\n"}; }

HttpResponse error_reply(int status, const Diagnostics& diags) { return reply(status, {{"diagnostics", diags_value(diags)}}); }

HttpResponse error_reply(int status, DiagCode code, std::string message) {
  return error_reply(status, Diagnostics{make_diag(code, std::move(message))});
}

// Parses a JSON object body; on failure fills `err`.
std::optional<json> object_body(std::string_view body, HttpResponse& err) {
  json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    err = error_reply(400, DiagCode::BadRequest, "request body must be a JSON object");
    return std::nullopt;
  }
  return doc;
}

std::optional<std::string> string_member(const json& doc, const char* key, HttpResponse& err) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    err = error_reply(400, DiagCode::BadRequest, std::string("'") + key + "' must be a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

bool only_keys(const json& doc, std::initializer_list<std::string_view> allowed, HttpResponse& err) {
  for (const auto& [key, _] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      err = error_reply(400, DiagCode::BadRequest, "unknown request field '" + key + "'");
      return false;
    }
  }
  return true;
}

int status_for(const Diagnostics& diags) {
  if (diags.empty()) return 500;
  switch (diags.front().code) {
    case DiagCode::Backend: return 502;
    case DiagCode::UnparseableOutput: return 422;
    case DiagCode::BadRequest:
    case DiagCode::CurrentCodeInvalid: return 400;
    default: return 500;
  }
}

// Decrements the in-flight counter on scope exit.
struct Slot {
  std::atomic<std::size_t>& counter;
  ~Slot() { counter.fetch_sub(1); }
};

}  // namespace

std::string ast_summary_json(const Program& program) { return summary_value(program).dump(2) + "\n"; }

std::string diagnostics_json(const Diagnostics& diags) { return json{{"diagnostics", diags_value(diags)}}.dump(2) + "\n"; }

Service::Service(ServiceConfig config, Registry registry, Corpus corpus, std::unique_ptr<CompletionBackend> backend)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      embedder_(config_.embedding_dimension),
      backend_(std::move(backend)) {
  corpus_ = corpus_build(std::move(corpus), embedder_);
}

Service::~Service() { stop(); }

Outcome<std::unique_ptr<Service>> Service::from_config(const ServiceConfig& config) {
  auto registry = load_registry(config.registry.empty() ? seed_registry_path() : config.registry);
  if (!registry) return fail(std::move(registry).error());
  auto corpus = corpus_load(config.corpus, *registry);
  if (!corpus) return fail(std::move(corpus).error());
  auto backend = make_backend(config.backend);
  if (!backend) return fail(std::move(backend).error());
  return std::make_unique<Service>(config, std::move(*registry), std::move(*corpus), std::move(*backend));
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  try {
    if (path == "/healthz") {
      if (method != "GET") return error_reply(405, DiagCode::BadRequest, "use GET");
      return reply(200, {{"status", "ok"}, {"backend", backend_->identify()}});
    }
    if (path == "/v1/components") {
      if (method != "GET") return error_reply(405, DiagCode::BadRequest, "use GET");
      return HttpResponse{200, registry_to_json(registry_)};
    }
    const bool known = path == "/v1/parse" || path == "/v1/compile" || path == "/v1/decompile" ||
                       path == "/v1/generate" || path == "/v1/edit";
    if (!known) return error_reply(404, DiagCode::NotFound, "no such endpoint: " + std::string(path));
    if (method != "POST") return error_reply(405, DiagCode::BadRequest, "use POST");
    if (path == "/v1/parse") return parse_endpoint(body);
    if (path == "/v1/compile") return compile_endpoint(body);
    if (path == "/v1/decompile") return decompile_endpoint(body);
    return generate_endpoint(body, path == "/v1/edit");
  } catch (const std::exception& e) {
    return error_reply(500, DiagCode::Io, std::string("internal error: ") + e.what());
  }
}

HttpResponse Service::parse_endpoint(std::string_view body) const {
  HttpResponse err;
  auto doc = object_body(body, err);
  if (!doc || !only_keys(*doc, {"code"}, err)) return err;
  auto code = string_member(*doc, "code", err);
  if (!code) return err;
  auto program = parse(*code);
  if (!program) return error_reply(400, program.error());
  return reply(200, {{"ast_summary", summary_value(*program)}});
}

HttpResponse Service::compile_endpoint(std::string_view body) const {
  HttpResponse err;
  auto doc = object_body(body, err);
  if (!doc || !only_keys(*doc, {"code"}, err)) return err;
  auto code = string_member(*doc, "code", err);
  if (!code) return err;
  auto program = parse(*code);
  if (!program) return error_reply(400, program.error());
  auto blocks = compile(*program, registry_);
  if (!blocks) return error_reply(400, blocks.error());
  return reply(200, {{"blocks", json::parse(blocks_to_json(*blocks))}});
}

HttpResponse Service::decompile_endpoint(std::string_view body) const {
  HttpResponse err;
  auto doc = object_body(body, err);
  if (!doc || !only_keys(*doc, {"blocks"}, err)) return err;
  auto it = doc->find("blocks");
  if (it == doc->end() || !(it->is_object() || it->is_string())) {
    return error_reply(400, DiagCode::BadRequest, "'blocks' must be a block document (object or string)");
  }
  auto blocks = blocks_from_json(it->is_string() ? it->get<std::string>() : it->dump());
  if (!blocks) return error_reply(400, blocks.error());
  auto program = decompile(*blocks, registry_);
  if (!program) return error_reply(400, program.error());
  return reply(200, {{"code", canonical_print(*program)}});
}

HttpResponse Service::generate_endpoint(std::string_view body, bool is_edit) {
  HttpResponse err;
  auto doc = object_body(body, err);
  if (!doc) return err;
  if (is_edit ? !only_keys(*doc, {"code", "instruction", "k", "model"}, err)
              : !only_keys(*doc, {"description", "k", "model"}, err)) {
    return err;
  }
  GenerationOptions options;
  options.k = config_.default_k;
  options.model = config_.default_model;
  options.timeout = std::chrono::seconds(config_.request_timeout_seconds);
  if (auto it = doc->find("k"); it != doc->end()) {
    if (!it->is_number_unsigned() || it->get<std::uint64_t>() > 1000) {
      return error_reply(400, DiagCode::BadRequest, "'k' must be an integer in [0, 1000]");
    }
    options.k = it->get<std::size_t>();
  }
  if (auto it = doc->find("model"); it != doc->end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      return error_reply(400, DiagCode::BadRequest, "'model' must be a non-empty string");
    }
    options.model = it->get<std::string>();
  }
  std::string code, instruction, description;
  if (is_edit) {
    auto c = string_member(*doc, "code", err);
    if (!c) return err;
    auto i = string_member(*doc, "instruction", err);
    if (!i) return err;
    code = std::move(*c);
    instruction = std::move(*i);
  } else {
    auto d = string_member(*doc, "description", err);
    if (!d) return err;
    description = std::move(*d);
  }

  if (in_flight_.fetch_add(1) >= config_.max_concurrent_generations) {
    in_flight_.fetch_sub(1);
    return error_reply(429, DiagCode::Busy, "too many generation requests in flight; retry later");
  }
  Slot slot{in_flight_};

  const GenerationContext ctx{registry_, corpus_, embedder_, *backend_};
  auto outcome = is_edit ? edit(code, instruction, ctx, options) : generate(description, ctx, options);
  if (!outcome) {
    const auto& f = outcome.error();
    json out = {{"diagnostics", diags_value(f.diagnostics)},
                {"raw_completions", f.raw_completions},
                {"attempts", f.attempts},
                {"examples_used", f.examples_used}};
    return reply(status_for(f.diagnostics), out);
  }
  const auto& r = *outcome;
  return reply(200, {{"code", r.canonical_code},
                     {"examples_used", r.examples_used},
                     {"attempts", r.attempts},
                     {"raw_completions", r.raw_completions},
                     {"prompt", r.prompt}});
}

void Service::install_routes() {
  std::call_once(routes_once_, [this] {
    server_ = std::make_unique<httplib::Server>();
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      HttpResponse r = handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    };
    for (const char* p : {"/v1/parse", "/v1/compile", "/v1/decompile", "/v1/generate", "/v1/edit"}) {
      server_->Post(p, forward);
    }
    server_->Get("/v1/components", forward);
    server_->Get("/healthz", forward);
    // the browser UI may be served from another origin
    server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                  {"Access-Control-Allow-Headers", "Content-Type"},
                                  {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server_->Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server_->set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      HttpResponse r = handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body, "application/json");
    });
    const auto timeout = static_cast<time_t>(config_.request_timeout_seconds) + 5;
    server_->set_read_timeout(timeout, 0);
    server_->set_write_timeout(timeout, 0);
  });
}

bool Service::listen() {
  install_routes();
  return server_->listen(config_.listen_host, config_.listen_port);
}

int Service::bind_any_port() {
  install_routes();
  return server_->bind_to_any_port(config_.listen_host);
}

bool Service::listen_after_bind() {
  install_routes();
  return server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace aptly
