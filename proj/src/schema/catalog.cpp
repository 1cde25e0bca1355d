#include "astres/schema/catalog.hpp"

#include <algorithm>

#include "astres/error.hpp"
#include "astres/util/io.hpp"

namespace astres::schema {

using nlohmann::json;
using util::to_lower;

std::string_view to_string(ColumnType type) noexcept {
  switch (type) {
  case ColumnType::Text: return "text";
  case ColumnType::Number: return "number";
  case ColumnType::Time: return "time";
  case ColumnType::Boolean: return "boolean";
  case ColumnType::Others: return "others";
  }
  return "others";
}

ColumnType column_type_from_string(std::string_view s) noexcept {
  std::string l = to_lower(s);
  if (l == "text")
    return ColumnType::Text;
  if (l == "number")
    return ColumnType::Number;
  if (l == "time")
    return ColumnType::Time;
  if (l == "boolean")
    return ColumnType::Boolean;
  return ColumnType::Others;
}

std::vector<ColumnId> SchemaCatalog::columns_of(TableId id) const {
  std::vector<ColumnId> out;
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].table == id)
      out.push_back(ColumnId{i});
  return out;
}

std::optional<TableId> SchemaCatalog::find_table(std::string_view name) const {
  std::string l = to_lower(name);
  for (std::size_t i = 0; i < tables.size(); ++i)
    if (to_lower(tables[i].name) == l)
      return TableId{i};
  return std::nullopt;
}

std::optional<ColumnId> SchemaCatalog::find_column(TableId table, std::string_view name) const {
  std::string l = to_lower(name);
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i].table == table && to_lower(columns[i].name) == l)
      return ColumnId{i};
  return std::nullopt;
}

void SchemaCatalog::validate() const {
  if (tables.empty())
    throw SchemaRefError(db_id + ": catalog has no tables");
  std::vector<std::size_t> per_table(tables.size(), 0);
  for (const auto &c : columns) {
    if (c.table.value >= tables.size())
      throw SchemaRefError(db_id + ": column " + c.name + " references a missing table");
    ++per_table[c.table.value];
  }
  for (std::size_t i = 0; i < tables.size(); ++i)
    if (per_table[i] == 0)
      throw SchemaRefError(db_id + ": table " + tables[i].name + " has no columns");
  for (ColumnId pk : primary_keys)
    if (pk.value >= columns.size())
      throw SchemaRefError(db_id + ": primary key out of range");
  for (const auto &[a, b] : foreign_keys)
    if (a.value >= columns.size() || b.value >= columns.size())
      throw SchemaRefError(db_id + ": foreign key out of range");
}

namespace {

// Spider indexes columns with the synthetic "*" at position 0.
ColumnId spider_column(const json &v, std::size_t n_columns, const std::string &db) {
  long idx = v.get<long>();
  if (idx < 1 || static_cast<std::size_t>(idx) > n_columns)
    throw SchemaRefError(db + ": key references column index " + std::to_string(idx));
  return ColumnId{static_cast<std::size_t>(idx - 1)};
}

} // namespace

SchemaCatalog catalog_from_spider(const json &record, const json *values, std::size_t value_cap) {
  SchemaCatalog cat;
  try {
    cat.db_id = record.at("db_id").get<std::string>();
    const auto &tnames = record.at("table_names_original");
    const json *tsem = record.contains("table_names") ? &record["table_names"] : nullptr;
    for (std::size_t i = 0; i < tnames.size(); ++i) {
      Table t;
      t.name = tnames[i].get<std::string>();
      t.semantic_name = tsem && i < tsem->size() ? (*tsem)[i].get<std::string>() : t.name;
      cat.tables.push_back(std::move(t));
    }

    const auto &cols = record.at("column_names_original");
    const json *csem = record.contains("column_names") ? &record["column_names"] : nullptr;
    const auto &types = record.at("column_types");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      long ti = cols[i].at(0).get<long>();
      if (ti < 0)
        continue;
      Column c;
      c.table = TableId{static_cast<std::size_t>(ti)};
      c.name = cols[i].at(1).get<std::string>();
      c.semantic_name = csem && i < csem->size() ? (*csem)[i].at(1).get<std::string>() : c.name;
      c.type = i < types.size() ? column_type_from_string(types[i].get<std::string>()) : ColumnType::Others;
      if (c.table.value >= cat.tables.size())
        throw SchemaRefError(cat.db_id + ": column " + c.name + " references a missing table");
      cat.columns.push_back(std::move(c));
    }

    const std::size_t n = cat.columns.size();
    for (const auto &pk : record.at("primary_keys")) {
      if (pk.is_array()) {
        for (const auto &p : pk)
          cat.primary_keys.push_back(spider_column(p, n, cat.db_id));
      } else {
        cat.primary_keys.push_back(spider_column(pk, n, cat.db_id));
      }
    }
    for (const auto &fk : record.at("foreign_keys"))
      cat.foreign_keys.emplace_back(spider_column(fk.at(0), n, cat.db_id),
                                    spider_column(fk.at(1), n, cat.db_id));
  } catch (const json::exception &e) {
    throw SchemaRefError("malformed schema record: " + std::string(e.what()));
  }

  if (values && values->is_object()) {
    std::map<std::string, const json *> by_key;
    for (const auto &[k, v] : values->items())
      by_key.emplace(to_lower(k), &v);
    for (auto &c : cat.columns) {
      auto it = by_key.find(to_lower(cat.tables[c.table.value].name + "." + c.name));
      if (it == by_key.end() || !it->second->is_array())
        continue;
      for (const auto &v : *it->second) {
        if (c.values.size() >= value_cap)
          break;
        std::string s = v.is_string() ? v.get<std::string>() : v.dump();
        if (std::find(c.values.begin(), c.values.end(), s) == c.values.end())
          c.values.push_back(std::move(s));
      }
    }
  }
  cat.validate();
  return cat;
}

std::map<std::string, SchemaCatalog>
load_spider_catalogs(const std::filesystem::path &tables_json,
                     const std::optional<std::filesystem::path> &values_json, std::size_t value_cap) {
  json tables = util::read_json(tables_json);
  json values = values_json ? util::read_json(*values_json) : json::object();
  std::map<std::string, SchemaCatalog> out;
  for (const auto &rec : tables) {
    std::string db = rec.value("db_id", "");
    const json *v = values.contains(db) ? &values[db] : nullptr;
    out.emplace(db, catalog_from_spider(rec, v, value_cap));
  }
  return out;
}

} // namespace astres::schema
