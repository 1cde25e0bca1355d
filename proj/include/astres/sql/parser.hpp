#pragma once

#include <string_view>

#include "astres/sql/ast.hpp"

namespace astres::sql {

/// Parses one statement of the Spider SQLite subset: SELECT with joins,
/// WHERE/GROUP BY/HAVING/ORDER BY/LIMIT, nested subqueries, compound
/// operators, aggregates and aliases. A single trailing ';' is accepted.
///
/// Throws ParseError (with byte offset) on malformed input and
/// UnsupportedConstruct for statements or expressions outside the subset.
SqlAst parse_sql(std::string_view text);

/// True if `word` is reserved and must be quoted when used as an identifier.
bool is_reserved_word(std::string_view word) noexcept;

} // namespace astres::sql
