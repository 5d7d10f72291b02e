#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/diagnostic.hpp"

namespace aptly {

struct CompletionRequest {
  std::string prompt;
  std::string model;
  double temperature = 0.2;
  int max_tokens = 1024;
  std::vector<std::string> stop;
  std::chrono::milliseconds timeout{60'000};
  std::stop_token cancel;
};

/// A text-completion service. complete() returns the completion text or
/// E_BACKEND; implementations must be safe to call from several threads.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual Outcome<std::string> complete(const CompletionRequest& request) = 0;
  virtual std::string identify() const = 0;
};

/// Offline backend: answers with the code of the example nearest the query,
/// i.e. the last example section of the prompt. For an edit prompt without
/// examples it echoes the current code.
class NearestEchoBackend final : public CompletionBackend {
 public:
  Outcome<std::string> complete(const CompletionRequest& request) override;
  std::string identify() const override { return "mock-echo"; }
};

/// Offline backend replaying a fixed queue of responses.
class ScriptedBackend final : public CompletionBackend {
 public:
  struct Entry {
    std::string text;
    bool is_error = false;
  };

  explicit ScriptedBackend(std::vector<Entry> script) : script_(std::move(script)) {}

  /// JSON array whose items are completion strings or {"error": "..."}.
  static Outcome<std::unique_ptr<ScriptedBackend>> from_json(std::string_view text);

  Outcome<std::string> complete(const CompletionRequest& request) override;
  std::string identify() const override { return "scripted"; }

  std::vector<std::string> prompts_seen() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> script_;
  std::size_t next_ = 0;
  std::vector<std::string> prompts_;
};

/// Completions-style HTTP endpoint. POSTs {model, prompt, temperature,
/// max_tokens, stop} and reads choices[0].text. The API key is read from the
/// named environment variable at call time and sent as a bearer token.
class RemoteBackend final : public CompletionBackend {
 public:
  RemoteBackend(std::string url, std::string api_key_env) : url_(std::move(url)), api_key_env_(std::move(api_key_env)) {}

  Outcome<std::string> complete(const CompletionRequest& request) override;
  std::string identify() const override { return "remote"; }

  /// Request body for `request`; exposed for tests.
  static std::string request_body(const CompletionRequest& request);
  /// Pulls choices[0].text out of a response body.
  static Outcome<std::string> parse_response(std::string_view body);

 private:
  std::string url_;
  std::string api_key_env_;
};

}  // namespace aptly
