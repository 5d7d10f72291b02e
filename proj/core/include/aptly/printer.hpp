#pragma once

#include <string>
#include <string_view>

#include "aptly/ast.hpp"

namespace aptly {

/// Canonical text for a Program: 2-space indentation, double-quoted strings,
/// component declarations as one block, then one blank line before each
/// global, procedure and handler. Always ends in a newline.
std::string canonical_print(const Program& program);

std::string print_expr(const Expr& expr);
std::string print_literal(const Literal& literal);

/// Double-quoted with `\"`, `\\` and `\n` escaped.
std::string quote_string(std::string_view text);

}  // namespace aptly
