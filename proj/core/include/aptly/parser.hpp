#pragma once

#include <string_view>

#include "aptly/ast.hpp"
#include "aptly/diagnostic.hpp"

namespace aptly {

/// Parses Aptly source into a Program that satisfies every registry-free
/// invariant. Component declarations come back in designer pre-order.
/// Never throws on malformed input; failures are returned as diagnostics.
Outcome<Program> parse(std::string_view source);

}  // namespace aptly
