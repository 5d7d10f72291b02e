#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aptly/diagnostic.hpp"

namespace aptly {

Outcome<std::string> read_text_file(const std::filesystem::path& file);

/// Writes via a sibling temporary file and rename, so readers never see a
/// half-written file. Existing targets that are not regular files are E_IO.
Outcome<bool> write_text_file(const std::filesystem::path& file, std::string_view text);

}  // namespace aptly
