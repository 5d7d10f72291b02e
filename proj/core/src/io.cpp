#include "aptly/io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace aptly {

Outcome<std::string> read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return fail(DiagCode::Io, "cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return fail(DiagCode::Io, "error reading " + file.string());
  return buf.str();
}

Outcome<bool> write_text_file(const std::filesystem::path& file, std::string_view text) {
  std::error_code ec;
  const auto status = std::filesystem::status(file, ec);
  if (std::filesystem::exists(status) && !std::filesystem::is_regular_file(status)) {
    return fail(DiagCode::Io, "refusing to replace " + file.string() + ": not a regular file");
  }
  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return fail(DiagCode::Io, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) return fail(DiagCode::Io, "error writing " + tmp.string());
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) return fail(DiagCode::Io, "cannot replace " + file.string() + ": " + ec.message());
  return true;
}

}  // namespace aptly
