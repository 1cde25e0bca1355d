#pragma once

#include <string>
#include <vector>

#include "astres/sql/ast.hpp"

namespace astres::sql {

/// Applies, in order:
///   1. lowercase identifiers; drop a column's table qualifier when the
///      qualifier names the only table of its FROM scope;
///   2. remove alias-creating nodes, replacing references with the aliased
///      table name (or the aliased expression for projection aliases used in
///      GROUP BY / HAVING / ORDER BY);
///   3. in-domain only: sort the sources of plain/inner/comma joins by name
///      and order the operands of '=' inside ON conditions;
///   4. cross-domain only: mask table, column and literal text as "_".
///
/// Throws UnresolvableAlias when a qualifier names nothing in scope.
NormalizedAst normalize(const SqlAst &ast, NormMode mode);

/// Runs the same steps on an already normalized tree; used to check
/// idempotence.
NormalizedAst normalize(const NormalizedAst &ast, NormMode mode);

/// One column reference found in a query, with its qualifier resolved
/// through table aliases of the enclosing scopes.
struct ColumnUse {
  std::string column;   // lowercase
  std::string table;    // resolved qualifier, or the sole table of the local scope
  bool qualified = false;
  bool via_derived = false; // qualifier names a derived table
  /// Tables of the enclosing FROM scopes, innermost scope first. Used to
  /// resolve unqualified names against a catalog.
  std::vector<std::string> scope_tables;
};

struct QueryRefs {
  std::vector<std::string> tables; // every base table named in any FROM, lowercase
  std::vector<ColumnUse> columns;  // stars and alias references excluded
};

/// Collects table and column references without a catalog.
QueryRefs collect_refs(const SqlAst &ast);

/// Number of distinct (table, column) pairs in `ast`; unqualified columns in
/// multi-table scopes use an empty table. Stars count as zero.
std::size_t count_unique_columns(const SqlAst &ast);

} // namespace astres::sql
