#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "astres/schema/catalog.hpp"

namespace astres::schema {

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

/// Tokens of one column: its table's name, its own name and its values,
/// each run through text::tokenize.
struct ColumnDocument {
  ColumnId column;
  std::vector<std::string> tokens;
};

ColumnDocument column_document(const SchemaCatalog &catalog, ColumnId column);

struct ScoredColumn {
  ColumnId column;
  double score = 0.0;
};

/// Okapi BM25 over the column documents of one database. Immutable once
/// built.
class ColumnIndex {
public:
  ColumnIndex(const SchemaCatalog &catalog, Bm25Params params = {});

  std::size_t size() const noexcept { return docs_.size(); }
  const ColumnDocument &document(std::size_t i) const { return docs_.at(i); }
  double idf(std::string_view term) const;

  /// Every column, best first; equal scores are ordered by table, then
  /// column position.
  std::vector<ScoredColumn> score(std::string_view question) const;
  std::vector<ScoredColumn> score_tokens(const std::vector<std::string> &query) const;

private:
  Bm25Params params_;
  std::vector<ColumnDocument> docs_;
  std::vector<TableId> tables_;
  std::vector<std::unordered_map<std::string, std::size_t>> tf_;
  std::unordered_map<std::string, std::size_t> df_;
  double avgdl_ = 0.0;
};

} // namespace astres::schema
