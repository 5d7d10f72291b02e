#pragma once

#include <chrono>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/backend.hpp"
#include "aptly/diagnostic.hpp"
#include "aptly/expected.hpp"
#include "aptly/registry.hpp"
#include "aptly/retrieval.hpp"

namespace aptly {

inline constexpr int kDefaultRepairs = 2;

struct GenerationOptions {
  std::size_t k = kDefaultK;
  std::string model = "default";
  double temperature = 0.2;
  int max_tokens = 1024;
  int max_repairs = kDefaultRepairs;
  std::chrono::milliseconds timeout{60'000};
  std::stop_token cancel;
};

/// Shared, read-only inputs of a generation call. The backend must be
/// thread-safe; everything else is immutable.
struct GenerationContext {
  const Registry& registry;
  const Corpus& corpus;
  const Embedder& embedder;
  CompletionBackend& backend;
};

struct GenerationResult {
  std::string code;            // extract of the final completion
  std::string canonical_code;  // canonical_print(parse(code))
  std::vector<std::string> examples_used;
  std::string prompt;  // the synthesized prompt of the first attempt
  std::vector<std::string> raw_completions;
  int attempts = 0;
};

struct GenerationFailure {
  Diagnostics diagnostics;  // E_BACKEND or E_UNPARSEABLE_OUTPUT first
  std::vector<std::string> examples_used;
  std::string prompt;
  std::vector<std::string> raw_completions;
  int attempts = 0;
};

using GenerationOutcome = Expected<GenerationResult, GenerationFailure>;

/// top_k -> prompt -> complete -> extract -> parse + validate, with up to
/// `max_repairs` re-prompts carrying the diagnostics.
GenerationOutcome generate(std::string_view description, const GenerationContext& ctx,
                           const GenerationOptions& options = {});

/// Same pipeline over the edit prompt. Examples are retrieved with the
/// instruction as the query. The current code must parse and validate.
GenerationOutcome edit(std::string_view current_code, std::string_view instruction, const GenerationContext& ctx,
                       const GenerationOptions& options = {});

}  // namespace aptly
