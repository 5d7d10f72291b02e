#include "aptly/backend.hpp"

#include <cstdlib>

#include "aptly/prompt.hpp"
#include "httplib.h"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

// ---------------------------------------------------------------------------
// NearestEchoBackend
// ---------------------------------------------------------------------------

Outcome<std::string> NearestEchoBackend::complete(const CompletionRequest& request) {
  const std::string_view prompt = request.prompt;
  const bool edit = prompt.starts_with(kEditHeader);
  std::size_t query = edit ? prompt.find(kCurrentMarker) : prompt.rfind(kDescriptionMarker);
  if (query == std::string_view::npos) return fail(DiagCode::Backend, "mock-echo: prompt has no query section");
  const std::string_view examples = prompt.substr(0, query);
  const std::size_t last = examples.rfind(kAptlyMarker);
  if (last != std::string_view::npos) {
    return std::string(trim(examples.substr(last + kAptlyMarker.size())));
  }
  if (edit) {
    std::string_view rest = prompt.substr(query + kCurrentMarker.size());
    const std::size_t end = rest.find(kEditMarker);
    return std::string(trim(rest.substr(0, end)));
  }
  return fail(DiagCode::Backend, "mock-echo: prompt has no example to echo");
}

// ---------------------------------------------------------------------------
// ScriptedBackend
// ---------------------------------------------------------------------------

Outcome<std::unique_ptr<ScriptedBackend>> ScriptedBackend::from_json(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    return fail(DiagCode::Config, "script must be a JSON array of strings or {\"error\": ...} objects");
  }
  std::vector<Entry> entries;
  for (const auto& item : doc) {
    if (item.is_string()) {
      entries.push_back(Entry{item.get<std::string>(), false});
    } else if (item.is_object() && item.size() == 1 && item.contains("error") && item.at("error").is_string()) {
      entries.push_back(Entry{item.at("error").get<std::string>(), true});
    } else {
      return fail(DiagCode::Config, "script entries must be strings or {\"error\": \"...\"}");
    }
  }
  return std::make_unique<ScriptedBackend>(std::move(entries));
}

Outcome<std::string> ScriptedBackend::complete(const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  prompts_.push_back(request.prompt);
  if (next_ >= script_.size()) return fail(DiagCode::Backend, "scripted backend: script exhausted");
  const Entry& e = script_[next_++];
  if (e.is_error) return fail(DiagCode::Backend, "scripted backend: " + e.text);
  return e.text;
}

std::vector<std::string> ScriptedBackend::prompts_seen() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return script_.size() - next_;
}

// ---------------------------------------------------------------------------
// RemoteBackend
// ---------------------------------------------------------------------------

std::string RemoteBackend::request_body(const CompletionRequest& request) {
  json body = {{"model", request.model},
               {"prompt", request.prompt},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens},
               {"stop", request.stop}};
  return body.dump();
}

Outcome<std::string> RemoteBackend::parse_response(std::string_view body) {
  json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded()) return fail(DiagCode::Backend, "remote: response is not JSON");
  const json* choices = doc.is_object() && doc.contains("choices") ? &doc.at("choices") : nullptr;
  if (!choices || !choices->is_array() || choices->empty() || !(*choices)[0].is_object() ||
      !(*choices)[0].contains("text") || !(*choices)[0].at("text").is_string()) {
    if (doc.is_object() && doc.contains("error")) return fail(DiagCode::Backend, "remote: " + doc.at("error").dump());
    return fail(DiagCode::Backend, "remote: response has no choices[0].text");
  }
  return (*choices)[0].at("text").get<std::string>();
}

Outcome<std::string> RemoteBackend::complete(const CompletionRequest& request) {
  // Split "scheme://host[:port]/path".
  const auto scheme_end = url_.find("://");
  if (scheme_end == std::string::npos) return fail(DiagCode::Backend, "remote: URL has no scheme: " + url_);
  const auto path_start = url_.find('/', scheme_end + 3);
  const std::string origin = url_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  httplib::Headers headers;
  if (!api_key_env_.empty()) {
    const char* key = std::getenv(api_key_env_.c_str());
    if (!key || !*key) return fail(DiagCode::Backend, "remote: environment variable " + api_key_env_ + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(origin);
  if (!client.is_valid()) return fail(DiagCode::Backend, "remote: unsupported URL " + url_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const std::stop_token cancel = request.cancel;
  if (cancel.stop_requested()) return fail(DiagCode::Backend, "remote: request cancelled");
  auto res = client.Post(path, headers, request_body(request), "application/json",
                         [&cancel](std::uint64_t, std::uint64_t) { return !cancel.stop_requested(); });
  if (!res) {
    if (cancel.stop_requested()) return fail(DiagCode::Backend, "remote: request cancelled");
    return fail(DiagCode::Backend, "remote: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    return fail(DiagCode::Backend, "remote: HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500));
  }
  return parse_response(res->body);
}

}  // namespace aptly
