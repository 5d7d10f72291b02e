#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aptly/diagnostic.hpp"
#include "aptly/retrieval.hpp"

namespace aptly {

inline constexpr std::string_view kGenerateHeader = "Write Aptly code for each app description.\n\n";
inline constexpr std::string_view kEditHeader = "Rewrite the current Aptly code to apply the requested edit.\n\n";
inline constexpr std::string_view kDescriptionMarker = "### Description:";
inline constexpr std::string_view kAptlyMarker = "### Aptly:";
inline constexpr std::string_view kCurrentMarker = "### Current Aptly:";
inline constexpr std::string_view kEditMarker = "### Edit:";
inline constexpr std::string_view kDiagnosticsMarker = "### Diagnostics:";

/// `examples` arrive most-similar first (top_k order) and are written in
/// reverse, so the closest example sits right above the query.
std::string synthesize_prompt(std::string_view description, const std::vector<ExamplePair>& examples);

/// Fails with E_CURRENT_CODE_INVALID when `current_code` does not parse.
Outcome<std::string> synthesize_edit_prompt(std::string_view current_code, std::string_view instruction,
                                            const std::vector<ExamplePair>& examples);

/// Prompt for a repair attempt: the base prompt, the rejected code, its
/// diagnostics, then a fresh `### Aptly:` section.
std::string synthesize_repair_prompt(std::string_view base_prompt, std::string_view rejected_code,
                                     const Diagnostics& diagnostics);

/// Cuts at the first `### Description:`, trims, and strips one surrounding
/// ``` fence (with optional language tag).
std::string extract_code(std::string_view raw);

std::string_view trim(std::string_view text);
std::string_view trim_end(std::string_view text);

}  // namespace aptly
