#include "aptly/prompt.hpp"

#include "aptly/parser.hpp"

namespace aptly {

namespace {

constexpr std::string_view kSpace = " \t\r\n";

void append_examples(std::string& out, const std::vector<ExamplePair>& examples) {
  for (auto it = examples.rbegin(); it != examples.rend(); ++it) {
    out += kDescriptionMarker;
    out += '\n';
    out += trim_end(it->description);
    out += '\n';
    out += kAptlyMarker;
    out += '\n';
    out += trim_end(it->code);
    out += "\n\n";
  }
}

}  // namespace

std::string_view trim(std::string_view text) {
  const auto begin = text.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  return text.substr(begin, text.find_last_not_of(kSpace) - begin + 1);
}

std::string_view trim_end(std::string_view text) {
  const auto end = text.find_last_not_of(kSpace);
  return end == std::string_view::npos ? std::string_view{} : text.substr(0, end + 1);
}

std::string synthesize_prompt(std::string_view description, const std::vector<ExamplePair>& examples) {
  std::string out(kGenerateHeader);
  append_examples(out, examples);
  out += kDescriptionMarker;
  out += '\n';
  out += trim_end(description);
  out += '\n';
  out += kAptlyMarker;
  out += '\n';
  return out;
}

Outcome<std::string> synthesize_edit_prompt(std::string_view current_code, std::string_view instruction,
                                            const std::vector<ExamplePair>& examples) {
  if (auto program = parse(current_code); !program) {
    Diagnostics diags = std::move(program).error();
    diags.insert(diags.begin(), make_diag(DiagCode::CurrentCodeInvalid, "current code does not parse"));
    return fail(std::move(diags));
  }
  std::string out(kEditHeader);
  append_examples(out, examples);
  out += kCurrentMarker;
  out += '\n';
  out += trim_end(current_code);
  out += '\n';
  out += kEditMarker;
  out += '\n';
  out += trim_end(instruction);
  out += '\n';
  out += kAptlyMarker;
  out += '\n';
  return out;
}

std::string synthesize_repair_prompt(std::string_view base_prompt, std::string_view rejected_code,
                                     const Diagnostics& diagnostics) {
  std::string out(base_prompt);
  out += trim_end(rejected_code);
  out += '\n';
  out += kDiagnosticsMarker;
  out += '\n';
  for (const auto& d : diagnostics) {
    out += format_diagnostic(d);
    out += '\n';
  }
  out += kAptlyMarker;
  out += '\n';
  return out;
}

std::string extract_code(std::string_view raw) {
  if (auto cut = raw.find(kDescriptionMarker); cut != std::string_view::npos) raw = raw.substr(0, cut);
  std::string_view text = trim(raw);
  if (text.starts_with("```")) {
    const auto first_newline = text.find('\n');
    const auto closing = text.rfind("```");
    if (first_newline != std::string_view::npos && closing > first_newline) {
      const std::string_view tag = trim(text.substr(3, first_newline - 3));
      const bool tag_ok = tag.find_first_of(" \t`") == std::string_view::npos;
      if (tag_ok && trim(text.substr(closing + 3)).empty()) {
        text = trim(text.substr(first_newline + 1, closing - first_newline - 1));
      }
    }
  }
  return std::string(text);
}

}  // namespace aptly
