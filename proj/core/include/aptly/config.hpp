#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "aptly/backend.hpp"
#include "aptly/diagnostic.hpp"
#include "aptly/retrieval.hpp"

namespace aptly {

struct BackendConfig {
  std::string kind = "mock-echo";  // mock-echo | scripted | remote
  std::string url;                 // remote
  std::string api_key_env;         // remote: name of the variable holding the key
  std::filesystem::path script;    // scripted
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path registry;  // empty: the bundled seed registry
  std::filesystem::path corpus;
  BackendConfig backend;
  std::size_t default_k = kDefaultK;
  std::string default_model = "default";
  int request_timeout_seconds = 60;
  std::size_t max_concurrent_generations = 4;
  std::size_t embedding_dimension = kDefaultDimension;
};

/// Strict JSON parse; unknown keys, a literal `api_key` and inconsistent
/// backend settings are E_CONFIG. Relative paths resolve against `base_dir`.
Outcome<ServiceConfig> parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

/// Reads and parses the file, then checks that every referenced path exists.
Outcome<ServiceConfig> load_config(const std::filesystem::path& file);

/// Path of the registry bundled with the library.
std::filesystem::path seed_registry_path();

Outcome<std::unique_ptr<CompletionBackend>> make_backend(const BackendConfig& config);

}  // namespace aptly
