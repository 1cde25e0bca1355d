#include "astres/schema/bm25.hpp"

#include <algorithm>
#include <cmath>

#include "astres/text/tokenize.hpp"

namespace astres::schema {

namespace {

const std::string &name_or_raw(const std::string &semantic, const std::string &raw) {
  return semantic.empty() ? raw : semantic;
}

} // namespace

ColumnDocument column_document(const SchemaCatalog &catalog, ColumnId id) {
  const Column &c = catalog.column(id);
  const Table &t = catalog.table(c.table);
  ColumnDocument doc{id, text::tokenize(name_or_raw(t.semantic_name, t.name))};
  for (auto &tok : text::tokenize(name_or_raw(c.semantic_name, c.name)))
    doc.tokens.push_back(std::move(tok));
  for (const auto &v : c.values)
    for (auto &tok : text::tokenize(v))
      doc.tokens.push_back(std::move(tok));
  return doc;
}

ColumnIndex::ColumnIndex(const SchemaCatalog &catalog, Bm25Params params) : params_(params) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < catalog.columns.size(); ++i) {
    docs_.push_back(column_document(catalog, ColumnId{i}));
    tables_.push_back(catalog.columns[i].table);
    auto &tf = tf_.emplace_back();
    for (const auto &tok : docs_.back().tokens)
      ++tf[tok];
    for (const auto &[term, n] : tf)
      ++df_[term];
    total += docs_.back().tokens.size();
  }
  avgdl_ = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

double ColumnIndex::idf(std::string_view term) const {
  auto it = df_.find(std::string(term));
  double n = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  double N = static_cast<double>(docs_.size());
  return std::max(0.0, std::log((N - n + 0.5) / (n + 0.5)));
}

std::vector<ScoredColumn> ColumnIndex::score_tokens(const std::vector<std::string> &query) const {
  std::vector<ScoredColumn> out;
  out.reserve(docs_.size());
  std::vector<double> idfs;
  idfs.reserve(query.size());
  for (const auto &q : query)
    idfs.push_back(idf(q));
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    double dl = static_cast<double>(docs_[d].tokens.size());
    double norm = params_.k1 * (1.0 - params_.b + params_.b * (avgdl_ > 0 ? dl / avgdl_ : 0.0));
    double s = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) {
      auto it = tf_[d].find(query[i]);
      if (it == tf_[d].end())
        continue;
      double tf = static_cast<double>(it->second);
      s += idfs[i] * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    out.push_back({docs_[d].column, s});
  }
  std::sort(out.begin(), out.end(), [this](const ScoredColumn &a, const ScoredColumn &b) {
    if (a.score != b.score)
      return a.score > b.score;
    return std::pair(tables_[a.column.value], a.column) < std::pair(tables_[b.column.value], b.column);
  });
  return out;
}

std::vector<ScoredColumn> ColumnIndex::score(std::string_view question) const {
  return score_tokens(text::tokenize(question));
}

} // namespace astres::schema
