#include "astres/eval/metrics.hpp"

#include "astres/error.hpp"
#include "astres/sql/normalize.hpp"
#include "astres/sql/parser.hpp"

namespace astres::eval {

bool recall_metric(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                   std::string_view gold_sql) {
  schema::SchemaElements gold = schema::resolve_elements(catalog, gold_sql);
  if (!gold.unresolved.empty())
    return false;
  for (auto t : gold.tables)
    if (!sub.has_table(t))
      return false;
  for (auto c : gold.columns)
    if (!sub.has_column(c))
      return false;
  return true;
}

double shortening_metric(const schema::SubSchema &sub, const schema::SchemaCatalog &catalog) {
  std::size_t total = catalog.tables.size() + catalog.columns.size();
  if (total == 0)
    return 0.0;
  std::size_t kept = 0;
  for (std::size_t t = 0; t < catalog.tables.size(); ++t)
    kept += sub.has_table(schema::TableId{t});
  for (std::size_t c = 0; c < catalog.columns.size(); ++c)
    kept += sub.has_column(schema::ColumnId{c});
  return static_cast<double>(total - kept) / static_cast<double>(total);
}

bool em_proxy(std::string_view pred_sql, std::string_view gold_sql) {
  try {
    auto p = sql::normalize(sql::parse_sql(pred_sql), sql::NormMode::InDomain);
    auto g = sql::normalize(sql::parse_sql(gold_sql), sql::NormMode::InDomain);
    return p == g;
  } catch (const Error &) {
    return false;
  }
}

std::size_t ast_bucket(double s) noexcept {
  if (s >= 0.95)
    return 0;
  if (s >= 0.9)
    return 1;
  if (s >= 0.85)
    return 2;
  if (s >= 0.8)
    return 3;
  return 4;
}

} // namespace astres::eval
