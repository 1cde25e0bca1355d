#pragma once

#include <string>

#include "astres/sql/ast.hpp"

namespace astres::sql {

/// Canonical single-line SQL: uppercase keywords and function names, single
/// spaces, ", " between list items. Parsing the result yields an identical
/// tree.
std::string render(const AstNode &node);

inline std::string render(const SqlAst &ast) { return render(ast.root); }
inline std::string render(const NormalizedAst &ast) { return render(ast.root); }

} // namespace astres::sql
