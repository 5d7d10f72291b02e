#include "aptly/config.hpp"

#include <cstdlib>
#include <set>

#include "aptly/io.hpp"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

namespace {

struct ConfigError {
  std::string message;
};

[[noreturn]] void bad(std::string message) { throw ConfigError{std::move(message)}; }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (key == "api_key") bad(where + ": API keys may not appear in the config file; use api_key_env");
    if (!allowed.count(key)) bad(where + ": unknown key '" + key + "'");
  }
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_string()) bad(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

long long get_int(const json& obj, const char* key, const std::string& where, long long lo, long long hi) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad(where + "." + key + ": expected an integer");
  const auto n = v.get<long long>();
  if (n < lo || n > hi) bad(where + "." + key + ": out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return n;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

ServiceConfig parse_document(std::string_view text, const std::filesystem::path& base) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) bad("config is not valid JSON");
  check_keys(doc, "config",
             {"listen_host", "listen_port", "registry", "corpus", "backend", "default_k", "default_model",
              "request_timeout_seconds", "max_concurrent_generations", "embedding_dimension"});
  ServiceConfig cfg;
  const std::string w = "config";
  if (doc.contains("listen_host")) cfg.listen_host = get_string(doc, "listen_host", w);
  if (doc.contains("listen_port")) cfg.listen_port = static_cast<int>(get_int(doc, "listen_port", w, 0, 65535));
  if (doc.contains("registry")) cfg.registry = resolve(base, get_string(doc, "registry", w));
  if (doc.contains("corpus")) cfg.corpus = resolve(base, get_string(doc, "corpus", w));
  if (doc.contains("default_k")) cfg.default_k = static_cast<std::size_t>(get_int(doc, "default_k", w, 0, 1000));
  if (doc.contains("default_model")) cfg.default_model = get_string(doc, "default_model", w);
  if (doc.contains("request_timeout_seconds")) {
    cfg.request_timeout_seconds = static_cast<int>(get_int(doc, "request_timeout_seconds", w, 1, 3600));
  }
  if (doc.contains("max_concurrent_generations")) {
    cfg.max_concurrent_generations =
        static_cast<std::size_t>(get_int(doc, "max_concurrent_generations", w, 1, 1024));
  }
  if (doc.contains("embedding_dimension")) {
    cfg.embedding_dimension = static_cast<std::size_t>(get_int(doc, "embedding_dimension", w, 1, 1 << 20));
  }
  if (doc.contains("backend")) {
    const auto& b = doc.at("backend");
    const std::string bw = "config.backend";
    check_keys(b, bw, {"kind", "url", "api_key_env", "script"});
    if (b.contains("kind")) cfg.backend.kind = get_string(b, "kind", bw);
    if (b.contains("url")) cfg.backend.url = get_string(b, "url", bw);
    if (b.contains("api_key_env")) cfg.backend.api_key_env = get_string(b, "api_key_env", bw);
    if (b.contains("script")) cfg.backend.script = resolve(base, get_string(b, "script", bw));
  }
  const auto& kind = cfg.backend.kind;
  if (kind != "mock-echo" && kind != "scripted" && kind != "remote") {
    bad("config.backend.kind: expected mock-echo, scripted or remote");
  }
  if (kind == "remote" && (cfg.backend.url.empty() || cfg.backend.api_key_env.empty())) {
    bad("config.backend: the remote backend needs both url and api_key_env");
  }
  if (kind == "scripted" && cfg.backend.script.empty()) bad("config.backend: the scripted backend needs a script");
  if (cfg.corpus.empty()) bad("config.corpus: required");
  return cfg;
}

}  // namespace

std::filesystem::path seed_registry_path() {
  if (const char* env = std::getenv("APTLY_SEED_REGISTRY"); env && *env) return env;
  std::error_code ec;
  if (std::filesystem::exists(APTLY_SEED_REGISTRY_BUILD, ec)) return APTLY_SEED_REGISTRY_BUILD;
  return APTLY_SEED_REGISTRY_INSTALL;
}

Outcome<ServiceConfig> parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  try {
    return parse_document(text, base_dir);
  } catch (const ConfigError& e) {
    return fail(DiagCode::Config, e.message);
  } catch (const json::exception& e) {
    return fail(DiagCode::Config, e.what());
  }
}

Outcome<ServiceConfig> load_config(const std::filesystem::path& file) {
  auto text = read_text_file(file);
  if (!text) return fail(DiagCode::Config, "cannot read config " + file.string());
  auto cfg = parse_config(*text, file.parent_path());
  if (!cfg) return cfg;
  if (cfg->registry.empty()) cfg->registry = seed_registry_path();
  for (const auto* p : {&cfg->registry, &cfg->corpus, &cfg->backend.script}) {
    if (!p->empty() && !std::filesystem::exists(*p)) return fail(DiagCode::Config, "path does not exist: " + p->string());
  }
  return cfg;
}

Outcome<std::unique_ptr<CompletionBackend>> make_backend(const BackendConfig& config) {
  if (config.kind == "mock-echo") return std::unique_ptr<CompletionBackend>(std::make_unique<NearestEchoBackend>());
  if (config.kind == "remote") {
    if (config.url.empty() || config.api_key_env.empty()) {
      return fail(DiagCode::Config, "the remote backend needs a URL and an API key environment variable");
    }
    return std::unique_ptr<CompletionBackend>(std::make_unique<RemoteBackend>(config.url, config.api_key_env));
  }
  if (config.kind == "scripted") {
    auto text = read_text_file(config.script);
    if (!text) return fail(DiagCode::Config, "cannot read script " + config.script.string());
    auto backend = ScriptedBackend::from_json(*text);
    if (!backend) return fail(std::move(backend).error());
    return std::unique_ptr<CompletionBackend>(std::move(*backend));
  }
  return fail(DiagCode::Config, "unknown backend kind '" + config.kind + "'");
}

}  // namespace aptly
