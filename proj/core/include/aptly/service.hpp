#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "aptly/ast.hpp"
#include "aptly/backend.hpp"
#include "aptly/config.hpp"
#include "aptly/diagnostic.hpp"
#include "aptly/registry.hpp"
#include "aptly/retrieval.hpp"

namespace httplib {
class Server;
}

namespace aptly {

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// {"components": [...], "globals": [...], "procedures": [...], "handlers": [...]}
std::string ast_summary_json(const Program& program);

/// {"diagnostics": [{"code", "message", "severity", "span": {...}}]}
std::string diagnostics_json(const Diagnostics& diags);

/// Request handling for the HTTP API, independent of any socket. Registry,
/// corpus and backend are fixed at construction; handle() is thread-safe.
class Service {
 public:
  Service(ServiceConfig config, Registry registry, Corpus corpus, std::unique_ptr<CompletionBackend> backend);
  ~Service();

  /// Loads registry and corpus, embeds missing vectors and builds the backend.
  static Outcome<std::unique_ptr<Service>> from_config(const ServiceConfig& config);

  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  /// Binds and serves until stop(). Returns false if the socket cannot be bound.
  bool listen();
  /// Binds to an ephemeral port on the configured host; returns the port or -1.
  int bind_any_port();
  /// Serves on a socket bound by bind_any_port().
  bool listen_after_bind();
  void stop();

  const ServiceConfig& config() const { return config_; }

 private:
  HttpResponse parse_endpoint(std::string_view body) const;
  HttpResponse compile_endpoint(std::string_view body) const;
  HttpResponse decompile_endpoint(std::string_view body) const;
  HttpResponse generate_endpoint(std::string_view body, bool is_edit);
  void install_routes();

  ServiceConfig config_;
  Registry registry_;
  Corpus corpus_;
  MockEmbedder embedder_;
  std::unique_ptr<CompletionBackend> backend_;
  std::atomic<std::size_t> in_flight_{0};
  std::unique_ptr<httplib::Server> server_;
  std::once_flag routes_once_;
};

}  // namespace aptly
