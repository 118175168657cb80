#pragma once

#include <string>

#include "remodyc/ast.hpp"

namespace remodyc {

/// Canonical concrete syntax of a model: agents, then actions, then tasks,
/// one blank line between definitions. Comments are not preserved.
std::string prettyPrint(const Model& m);

/// Expression text with the minimum parentheses needed to reparse it.
std::string printExpression(const Expression& e);

}  // namespace remodyc
