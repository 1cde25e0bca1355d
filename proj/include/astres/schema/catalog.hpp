#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace astres::schema {

struct TableId {
  std::size_t value = 0;
  friend auto operator<=>(const TableId &, const TableId &) = default;
};

struct ColumnId {
  std::size_t value = 0;
  friend auto operator<=>(const ColumnId &, const ColumnId &) = default;
};

enum class ColumnType { Text, Number, Time, Boolean, Others };

std::string_view to_string(ColumnType type) noexcept;
ColumnType column_type_from_string(std::string_view s) noexcept;

struct Table {
  std::string name;
  std::string semantic_name;
};

struct Column {
  TableId table;
  std::string name;
  std::string semantic_name;
  ColumnType type = ColumnType::Text;
  std::vector<std::string> values; // distinct, catalog order
};

/// One database: tables, columns in flattened table order, keys and value
/// samples. Spider's synthetic "*" column is not represented.
struct SchemaCatalog {
  std::string db_id;
  std::vector<Table> tables;
  std::vector<Column> columns;
  std::vector<ColumnId> primary_keys;
  std::vector<std::pair<ColumnId, ColumnId>> foreign_keys;

  const Table &table(TableId id) const { return tables.at(id.value); }
  const Column &column(ColumnId id) const { return columns.at(id.value); }

  std::vector<ColumnId> columns_of(TableId id) const;

  /// Case-insensitive lookups by raw name.
  std::optional<TableId> find_table(std::string_view name) const;
  std::optional<ColumnId> find_column(TableId table, std::string_view name) const;

  /// Throws SchemaRefError when a reference is out of range, a table has no
  /// columns, or the catalog is empty.
  void validate() const;
};

/// Parses one record of Spider's tables.json. `values` maps "table.column"
/// (raw names, any case) to sample values; at most `value_cap` distinct
/// values are kept per column.
SchemaCatalog catalog_from_spider(const nlohmann::json &record, const nlohmann::json *values,
                                  std::size_t value_cap = 1000);

/// Loads every database of a tables.json plus an optional values sidecar
/// ({db_id: {"table.column": [values]}}).
std::map<std::string, SchemaCatalog>
load_spider_catalogs(const std::filesystem::path &tables_json,
                     const std::optional<std::filesystem::path> &values_json,
                     std::size_t value_cap = 1000);

} // namespace astres::schema
