#include "astres/schema/select.hpp"

#include <algorithm>

#include "astres/error.hpp"
#include "astres/sql/normalize.hpp"
#include "astres/sql/parser.hpp"
#include "astres/util/io.hpp"

namespace astres::schema {

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
  case Provenance::Bm25: return "bm25";
  case Provenance::ApproxQuery: return "approx-query";
  case Provenance::KeyCompletion: return "key-completion";
  case Provenance::Full: return "full";
  }
  return "?";
}

std::string_view to_string(SelectionMode m) noexcept {
  switch (m) {
  case SelectionMode::Bm25TopK: return "bm25-topk";
  case SelectionMode::ApproxOnly: return "approx-only";
  case SelectionMode::HybridDynamic: return "hybrid-dynamic";
  case SelectionMode::Full: return "full";
  }
  return "?";
}

SelectionMode selection_mode_from_string(std::string_view s) {
  for (auto m : {SelectionMode::Bm25TopK, SelectionMode::ApproxOnly, SelectionMode::HybridDynamic,
                 SelectionMode::Full})
    if (to_string(m) == s)
      return m;
  throw ConfigError("unknown selection mode '" + std::string(s) + "'");
}

std::size_t dynamic_k(std::size_t gamma) noexcept {
  return std::clamp<std::size_t>(3 * gamma / 2, 6, 20);
}

std::size_t dynamic_k_for(std::string_view approx_sql) {
  return dynamic_k(sql::count_unique_columns(sql::parse_sql(approx_sql)));
}

SchemaElements resolve_elements(const SchemaCatalog &catalog, std::string_view sql_text) {
  sql::QueryRefs refs = sql::collect_refs(sql::parse_sql(sql_text));
  SchemaElements out;
  for (const auto &t : refs.tables) {
    if (auto id = catalog.find_table(t))
      out.tables.insert(*id);
    else
      out.unresolved.push_back(t);
  }
  for (const auto &u : refs.columns) {
    if (u.via_derived)
      continue;
    std::optional<ColumnId> col;
    if (u.qualified) {
      if (auto t = catalog.find_table(u.table))
        col = catalog.find_column(*t, u.column);
    } else {
      for (const auto &name : u.scope_tables) {
        if (auto t = catalog.find_table(name)) {
          if ((col = catalog.find_column(*t, u.column)))
            break;
        }
      }
    }
    if (col) {
      out.columns.insert(*col);
      out.tables.insert(catalog.column(*col).table);
    } else {
      out.unresolved.push_back(u.qualified ? u.table + "." + u.column : u.column);
    }
  }
  return out;
}

namespace {

void add_column(const SchemaCatalog &catalog, SubSchema &sub, ColumnId c, Provenance p) {
  if (sub.columns.emplace(c, p).second)
    sub.tables.insert(catalog.column(c).table);
}

void add_approx(const SchemaCatalog &catalog, SubSchema &sub, const std::string &approx_sql) {
  SchemaElements el = resolve_elements(catalog, approx_sql);
  for (ColumnId c : el.columns)
    add_column(catalog, sub, c, Provenance::ApproxQuery);
  for (TableId t : el.tables)
    sub.tables.insert(t);
}

void add_bm25(const SchemaCatalog &catalog, const ColumnIndex &index, SubSchema &sub,
              std::string_view question, std::size_t k) {
  auto ranked = index.score(question);
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
    add_column(catalog, sub, ranked[i].column, Provenance::Bm25);
}

const std::string &require(const std::optional<std::string> &approx_sql, SelectionMode mode) {
  if (!approx_sql)
    throw ModeMismatch(std::string(to_string(mode)) + " selection needs an approximated query");
  return *approx_sql;
}

} // namespace

void complete_keys(const SchemaCatalog &catalog, SubSchema &sub) {
  for (ColumnId pk : catalog.primary_keys)
    if (sub.has_table(catalog.column(pk).table))
      sub.columns.emplace(pk, Provenance::KeyCompletion);
  for (const auto &[a, b] : catalog.foreign_keys) {
    if (sub.has_table(catalog.column(a).table) && sub.has_table(catalog.column(b).table)) {
      sub.columns.emplace(a, Provenance::KeyCompletion);
      sub.columns.emplace(b, Provenance::KeyCompletion);
    }
  }
}

SubSchema select_sub_schema(const SchemaCatalog &catalog, const ColumnIndex &index,
                            std::string_view question, const std::optional<std::string> &approx_sql,
                            const SelectionConfig &config) {
  SubSchema sub;
  sub.db_id = catalog.db_id;
  switch (config.mode) {
  case SelectionMode::Full:
    for (std::size_t i = 0; i < catalog.columns.size(); ++i)
      add_column(catalog, sub, ColumnId{i}, Provenance::Full);
    for (std::size_t i = 0; i < catalog.tables.size(); ++i)
      sub.tables.insert(TableId{i});
    break;
  case SelectionMode::Bm25TopK:
    add_bm25(catalog, index, sub, question, config.k);
    complete_keys(catalog, sub);
    break;
  case SelectionMode::ApproxOnly: {
    add_approx(catalog, sub, require(approx_sql, config.mode));
    std::set<TableId> covered;
    for (const auto &[c, p] : sub.columns)
      covered.insert(catalog.column(c).table);
    for (ColumnId pk : catalog.primary_keys) {
      TableId t = catalog.column(pk).table;
      if (sub.has_table(t) && !covered.count(t))
        sub.columns.emplace(pk, Provenance::KeyCompletion);
    }
    break;
  }
  case SelectionMode::HybridDynamic: {
    const std::string &approx = require(approx_sql, config.mode);
    std::size_t k = dynamic_k_for(approx);
    add_approx(catalog, sub, approx);
    add_bm25(catalog, index, sub, question, k);
    complete_keys(catalog, sub);
    break;
  }
  }
  return sub;
}

SchemaCatalog prune(const SchemaCatalog &catalog, const SubSchema &sub) {
  SchemaCatalog out;
  out.db_id = catalog.db_id;
  std::map<TableId, TableId> tmap;
  std::map<ColumnId, ColumnId> cmap;
  for (std::size_t t = 0; t < catalog.tables.size(); ++t) {
    if (!sub.has_table(TableId{t}))
      continue;
    tmap[TableId{t}] = TableId{out.tables.size()};
    out.tables.push_back(catalog.tables[t]);
  }
  for (std::size_t c = 0; c < catalog.columns.size(); ++c) {
    if (!sub.has_column(ColumnId{c}))
      continue;
    Column col = catalog.columns[c];
    col.table = tmap.at(col.table);
    cmap[ColumnId{c}] = ColumnId{out.columns.size()};
    out.columns.push_back(std::move(col));
  }
  for (ColumnId pk : catalog.primary_keys)
    if (cmap.count(pk))
      out.primary_keys.push_back(cmap[pk]);
  for (const auto &[a, b] : catalog.foreign_keys)
    if (cmap.count(a) && cmap.count(b))
      out.foreign_keys.emplace_back(cmap[a], cmap[b]);
  return out;
}

} // namespace astres::schema
