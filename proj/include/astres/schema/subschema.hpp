#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "astres/schema/catalog.hpp"

namespace astres::schema {

enum class Provenance { Bm25, ApproxQuery, KeyCompletion, Full };

std::string_view to_string(Provenance p) noexcept;

struct ValueSelection {
  ColumnId column;
  std::vector<std::string> values; // at most the configured top-k, distinct
  bool matched = false;            // some value shares a token with the question
};

/// Selected part of one catalog. Every selected column's table is selected.
struct SubSchema {
  std::string db_id;
  std::set<TableId> tables;
  std::map<ColumnId, Provenance> columns;
  std::map<ColumnId, ValueSelection> values;

  bool has_table(TableId t) const { return tables.count(t) != 0; }
  bool has_column(ColumnId c) const { return columns.count(c) != 0; }
};

/// Tables and columns a query touches, resolved against a catalog.
struct SchemaElements {
  std::set<TableId> tables;
  std::set<ColumnId> columns;
  std::vector<std::string> unresolved; // names the catalog does not know
};

/// Resolves the tables and columns of `sql`. Qualified columns go through
/// table aliases; an unqualified column binds to the first table of its
/// FROM scope (innermost scope first) that has a column of that name.
SchemaElements resolve_elements(const SchemaCatalog &catalog, std::string_view sql);

} // namespace astres::schema
