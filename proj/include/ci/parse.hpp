#pragma once

#include <string>

#include "ci/expr.hpp"

namespace ci {

// Parses the plain-text expression grammar (see docs/model-format.md)
// against declared symbols.  Returns the canonical form; printing a
// canonical expression and re-parsing it is the identity.
Expr parse(const std::string& text, const SymbolTable& tab);

}  // namespace ci
