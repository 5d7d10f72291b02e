#include "aptly/diagnostic.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace aptly {

namespace {

constexpr std::array<std::pair<DiagCode, std::string_view>, 40> kCodeNames{{
    {DiagCode::TabIndent, "E_TAB_INDENT"},
    {DiagCode::UnterminatedString, "E_UNTERMINATED_STRING"},
    {DiagCode::BadChar, "E_BAD_CHAR"},
    {DiagCode::EmptyProgram, "E_EMPTY_PROGRAM"},
    {DiagCode::DupName, "E_DUP_NAME"},
    {DiagCode::UndeclaredParent, "E_UNDECLARED_PARENT"},
    {DiagCode::ReturnPosition, "E_RETURN_POSITION"},
    {DiagCode::Syntax, "E_SYNTAX"},
    {DiagCode::RegistryParse, "E_REGISTRY_PARSE"},
    {DiagCode::RegistryMissingScreen, "E_REGISTRY_MISSING_SCREEN"},
    {DiagCode::UnknownComponentType, "E_UNKNOWN_COMPONENT_TYPE"},
    {DiagCode::UnknownProperty, "E_UNKNOWN_PROPERTY"},
    {DiagCode::PropertyType, "E_PROPERTY_TYPE"},
    {DiagCode::UnknownEvent, "E_UNKNOWN_EVENT"},
    {DiagCode::EventArity, "E_EVENT_ARITY"},
    {DiagCode::UnknownMethod, "E_UNKNOWN_METHOD"},
    {DiagCode::UnknownBuiltin, "E_UNKNOWN_BUILTIN"},
    {DiagCode::Arity, "E_ARITY"},
    {DiagCode::NoResult, "E_NO_RESULT"},
    {DiagCode::UnresolvedName, "E_UNRESOLVED_NAME"},
    {DiagCode::NotContainer, "E_NOT_CONTAINER"},
    {DiagCode::NotValidated, "E_NOT_VALIDATED"},
    {DiagCode::UnknownOpcode, "E_UNKNOWN_OPCODE"},
    {DiagCode::MalformedBlock, "E_MALFORMED_BLOCK"},
    {DiagCode::OrphanInstance, "E_ORPHAN_INSTANCE"},
    {DiagCode::BlocksJsonParse, "E_BLOCKS_JSON_PARSE"},
    {DiagCode::BlocksJsonVersion, "E_BLOCKS_JSON_VERSION"},
    {DiagCode::DimMismatch, "E_DIM_MISMATCH"},
    {DiagCode::MissingEmbedding, "E_MISSING_EMBEDDING"},
    {DiagCode::CorpusParse, "E_CORPUS_PARSE"},
    {DiagCode::CorpusDupId, "E_CORPUS_DUP_ID"},
    {DiagCode::CorpusCodeInvalid, "E_CORPUS_CODE_INVALID"},
    {DiagCode::CurrentCodeInvalid, "E_CURRENT_CODE_INVALID"},
    {DiagCode::Backend, "E_BACKEND"},
    {DiagCode::UnparseableOutput, "E_UNPARSEABLE_OUTPUT"},
    {DiagCode::BadRequest, "E_BAD_REQUEST"},
    {DiagCode::Busy, "E_BUSY"},
    {DiagCode::NotFound, "E_NOT_FOUND"},
    {DiagCode::Config, "E_CONFIG"},
    {DiagCode::Io, "E_IO"},
}};

}  // namespace

std::string_view code_name(DiagCode code) {
  for (const auto& [c, name] : kCodeNames) {
    if (c == code) return name;
  }
  return "E_UNKNOWN";
}

std::optional<DiagCode> code_from_name(std::string_view name) {
  for (const auto& [c, n] : kCodeNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

std::vector<DiagCode> all_codes() {
  std::vector<DiagCode> out;
  out.reserve(kCodeNames.size());
  for (const auto& entry : kCodeNames) out.push_back(entry.first);
  return out;
}

std::string format_diagnostic(const Diagnostic& d) {
  std::string out = std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": ";
  out += d.severity == Severity::Error ? "error: " : "warning: ";
  out += code_name(d.code);
  out += ": ";
  out += d.message;
  return out;
}

bool has_code(const Diagnostics& diags, DiagCode code) {
  return std::any_of(diags.begin(), diags.end(), [code](const Diagnostic& d) { return d.code == code; });
}

}  // namespace aptly
