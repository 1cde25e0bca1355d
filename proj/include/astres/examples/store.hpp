#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "astres/examples/embedder.hpp"
#include "astres/sql/diff.hpp"

namespace astres::examples {

struct ExamplePair {
  std::string id;
  std::string question;
  std::string sql;
  std::string db_id; // optional; lets callers exclude same-database examples
};

struct ExampleRecord {
  std::string id;
  std::string question;
  std::string sql;
  std::string db_id;
  std::vector<float> embedding; // unit norm
  sql::NormalizedAst normalized_ast; // cross-domain
  std::shared_ptr<const sql::PreparedTree> prepared;
};

/// Immutable after construction; safe for concurrent readers.
class ExampleIndex {
public:
  ExampleIndex() = default;
  ExampleIndex(std::string embedder_id, std::vector<ExampleRecord> records);

  const std::string &embedder_id() const noexcept { return embedder_id_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  const std::vector<ExampleRecord> &records() const noexcept { return records_; }

  /// Writes records.jsonl and embeddings.bin under `dir`.
  void save(const std::filesystem::path &dir) const;
  static ExampleIndex load(const std::filesystem::path &dir);

private:
  std::string embedder_id_;
  std::size_t dim_ = 0;
  std::vector<ExampleRecord> records_;
};

/// Embeds and normalizes every pair. A pair whose SQL does not parse raises
/// ParseError naming its id.
ExampleIndex build_index(const std::vector<ExamplePair> &pairs, const Embedder &embedder,
                         std::size_t workers = 1);

struct RankedRecord {
  std::size_t record; // position in ExampleIndex::records()
  double cosine = 0.0;
  std::size_t rank = 0; // 0-based question-similarity rank
};

struct RetrieveOptions {
  std::size_t pool = 500;
  std::optional<std::string> exclude_db; // skip examples of this database
};

/// Records by descending cosine similarity to the question; ties by id.
std::vector<RankedRecord> retrieve_by_question(const ExampleIndex &index, const Embedder &embedder,
                                               const EmbedRequest &question,
                                               const RetrieveOptions &opts = {});

struct ChosenExample {
  std::string id;
  std::string question;
  std::string sql;
  double ast_score = 0.0;
  std::size_t question_rank = 0;
};

struct SelectionResult {
  /// Prompt order: ascending AST score, the most similar example last.
  std::vector<ChosenExample> chosen;
  std::size_t pool_size = 0;
  bool fallback = false; // approximated query unusable; ranked by question only
};

/// Re-ranks the question-similarity pool by AST similarity to the
/// approximated query and keeps the best `e`; ties go to the better
/// question rank, then id. Without a parseable approximation the top `e`
/// by question similarity are used and `fallback` is set.
SelectionResult select_examples(const ExampleIndex &index, const Embedder &embedder,
                                const EmbedRequest &question,
                                const std::optional<std::string> &approx_sql, std::size_t e = 5,
                                const RetrieveOptions &opts = {});

/// Same, for a question vector computed by the caller.
SelectionResult select_examples(const ExampleIndex &index, const std::vector<float> &question_vec,
                                const std::optional<std::string> &approx_sql, std::size_t e,
                                const RetrieveOptions &opts);

} // namespace astres::examples
