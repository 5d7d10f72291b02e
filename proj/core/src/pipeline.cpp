#include "aptly/pipeline.hpp"

#include "aptly/parser.hpp"
#include "aptly/printer.hpp"
#include "aptly/prompt.hpp"

namespace aptly {

namespace {

Unexpected<GenerationFailure> failure(Diagnostics diags, std::string prompt = {},
                                      std::vector<std::string> examples = {}) {
  return {GenerationFailure{std::move(diags), std::move(examples), std::move(prompt), {}, 0}};
}

struct Retrieved {
  std::vector<ExamplePair> pairs;
  std::vector<std::string> ids;
};

Outcome<Retrieved> retrieve(std::string_view query, const GenerationContext& ctx, std::size_t k) {
  auto hits = top_k(query, ctx.corpus, k, ctx.embedder);
  if (!hits) return fail(std::move(hits).error());
  Retrieved out;
  for (const auto& h : *hits) {
    out.pairs.push_back(*h.pair);
    out.ids.push_back(h.pair->id);
  }
  return out;
}

// Parse and validate; diagnostics on failure.
Diagnostics check(std::string_view code, const Registry& registry, std::string* canonical) {
  auto program = parse(code);
  if (!program) return std::move(program).error();
  Diagnostics diags = validate(*program, registry);
  if (diags.empty() && canonical) *canonical = canonical_print(*program);
  return diags;
}

GenerationOutcome run(std::string base_prompt, std::vector<std::string> examples, const GenerationContext& ctx,
                      const GenerationOptions& options) {
  GenerationFailure state{{}, std::move(examples), std::move(base_prompt), {}, 0};
  std::string prompt = state.prompt;
  const int total = 1 + std::max(0, options.max_repairs);
  Diagnostics last;
  for (int attempt = 0; attempt < total; ++attempt) {
    if (options.cancel.stop_requested()) {
      state.diagnostics = {make_diag(DiagCode::Backend, "generation cancelled")};
      return Unexpected<GenerationFailure>{std::move(state)};
    }
    CompletionRequest request{prompt,
                              options.model,
                              options.temperature,
                              options.max_tokens,
                              {std::string(kDescriptionMarker)},
                              options.timeout,
                              options.cancel};
    auto raw = ctx.backend.complete(request);
    if (!raw) {
      state.diagnostics = std::move(raw).error();
      if (state.diagnostics.empty() || state.diagnostics.front().code != DiagCode::Backend) {
        state.diagnostics.insert(state.diagnostics.begin(), make_diag(DiagCode::Backend, "backend failed"));
      }
      return Unexpected<GenerationFailure>{std::move(state)};
    }
    ++state.attempts;
    state.raw_completions.push_back(*raw);
    std::string code = extract_code(*raw);
    std::string canonical;
    last = check(code, ctx.registry, &canonical);
    if (last.empty()) {
      return GenerationResult{std::move(code),
                              std::move(canonical),
                              std::move(state.examples_used),
                              std::move(state.prompt),
                              std::move(state.raw_completions),
                              state.attempts};
    }
    prompt = synthesize_repair_prompt(state.prompt, code, last);
  }
  state.diagnostics = std::move(last);
  state.diagnostics.insert(
      state.diagnostics.begin(),
      make_diag(DiagCode::UnparseableOutput,
                "no valid Aptly code after " + std::to_string(state.attempts) + " attempts; raw output: " +
                    (state.raw_completions.empty() ? std::string() : state.raw_completions.back().substr(0, 200))));
  return Unexpected<GenerationFailure>{std::move(state)};
}

}  // namespace

GenerationOutcome generate(std::string_view description, const GenerationContext& ctx,
                           const GenerationOptions& options) {
  if (trim(description).empty()) {
    return failure({make_diag(DiagCode::BadRequest, "description must not be empty")});
  }
  auto retrieved = retrieve(description, ctx, options.k);
  if (!retrieved) return failure(std::move(retrieved).error());
  std::string prompt = synthesize_prompt(description, retrieved->pairs);
  return run(std::move(prompt), std::move(retrieved->ids), ctx, options);
}

GenerationOutcome edit(std::string_view current_code, std::string_view instruction, const GenerationContext& ctx,
                       const GenerationOptions& options) {
  if (Diagnostics diags = check(current_code, ctx.registry, nullptr); !diags.empty()) {
    diags.insert(diags.begin(), make_diag(DiagCode::CurrentCodeInvalid, "current code does not parse and validate"));
    return failure(std::move(diags));
  }
  if (trim(instruction).empty()) {
    return failure({make_diag(DiagCode::BadRequest, "edit instruction must not be empty")});
  }
  auto retrieved = retrieve(instruction, ctx, options.k);
  if (!retrieved) return failure(std::move(retrieved).error());
  auto prompt = synthesize_edit_prompt(current_code, instruction, retrieved->pairs);
  if (!prompt) return failure(std::move(prompt).error());
  return run(std::move(*prompt), std::move(retrieved->ids), ctx, options);
}

}  // namespace aptly
