#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/expected.hpp"

namespace aptly {

/// 1-based line and column; length counted in characters (UTF-8 code points).
struct SourceSpan {
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
  friend auto operator<=>(const SourceSpan&, const SourceSpan&) = default;
};

/// Closed set of machine-readable diagnostic codes. The string form
/// (E_...) is stable and is what clients match on.
enum class DiagCode {
  // lexer
  TabIndent,
  UnterminatedString,
  BadChar,
  // parser / program invariants
  EmptyProgram,
  DupName,
  UndeclaredParent,
  ReturnPosition,
  Syntax,
  // registry file
  RegistryParse,
  RegistryMissingScreen,
  // semantic validation
  UnknownComponentType,
  UnknownProperty,
  PropertyType,
  UnknownEvent,
  EventArity,
  UnknownMethod,
  UnknownBuiltin,
  Arity,
  NoResult,
  UnresolvedName,
  NotContainer,
  // blocks
  NotValidated,
  UnknownOpcode,
  MalformedBlock,
  OrphanInstance,
  BlocksJsonParse,
  BlocksJsonVersion,
  // retrieval
  DimMismatch,
  MissingEmbedding,
  CorpusParse,
  CorpusDupId,
  CorpusCodeInvalid,
  // generation
  CurrentCodeInvalid,
  Backend,
  UnparseableOutput,
  // interface
  BadRequest,
  Busy,
  NotFound,
  Config,
  Io,
};

enum class Severity { Error, Warning };

std::string_view code_name(DiagCode code);
std::optional<DiagCode> code_from_name(std::string_view name);
std::vector<DiagCode> all_codes();

struct Diagnostic {
  DiagCode code = DiagCode::Syntax;
  std::string message;
  SourceSpan span;
  Severity severity = Severity::Error;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

template <typename T>
using Outcome = Expected<T, Diagnostics>;

inline Diagnostic make_diag(DiagCode code, std::string message, SourceSpan span = {}) {
  return Diagnostic{code, std::move(message), span, Severity::Error};
}

inline Unexpected<Diagnostics> fail(DiagCode code, std::string message, SourceSpan span = {}) {
  return {Diagnostics{make_diag(code, std::move(message), span)}};
}

inline Unexpected<Diagnostics> fail(Diagnostics diags) { return {std::move(diags)}; }

/// "line:col: error: E_CODE: message"
std::string format_diagnostic(const Diagnostic& d);

bool has_code(const Diagnostics& diags, DiagCode code);

}  // namespace aptly
