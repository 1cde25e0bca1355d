#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace astres::split {

enum class CompletionToken { FullSchema, PartSchema };

std::string_view to_string(CompletionToken t) noexcept; // "[full_schema]" / "[part_schema]"

using TokenGroup = std::vector<std::string>;

/// One model input of the splitting scheme: question, completion token, up
/// to r columns and then every table.
struct SchemaSplit {
  std::size_t index = 0;
  std::vector<std::string> question_tokens;
  CompletionToken completion_token = CompletionToken::FullSchema;
  std::vector<TokenGroup> column_slice;
  std::vector<std::size_t> column_positions; // flattened catalog positions of column_slice
  std::vector<TokenGroup> table_tokens;

  /// Flat token sequence. A separator, when given, goes between
  /// consecutive columns.
  std::vector<std::string> tokens(const std::optional<std::string> &separator = std::nullopt) const;
};

/// Columns are taken r at a time in catalog order; every split repeats the
/// full table list. Throws InvalidR when r < 1 and std::invalid_argument
/// on an empty column list.
std::vector<SchemaSplit> split_schema(const std::vector<std::string> &question_tokens,
                                      const std::vector<TokenGroup> &column_tokens,
                                      const std::vector<TokenGroup> &table_tokens, std::size_t r);

/// Labels keyed by flattened column position and table index.
struct SspLabeling {
  std::map<std::size_t, std::string> column_labels;
  std::map<std::size_t, std::string> table_labels;

  friend bool operator==(const SspLabeling &, const SspLabeling &) = default;
};

struct SplitLabels {
  std::size_t split_index = 0;
  SspLabeling labels;
};

/// Union of column labels; each table takes the most frequent label across
/// splits, ties going to the label seen in the lowest split index. A split
/// index submitted twice counts once. Throws MissingColumn unless columns
/// 0..n_columns-1 are all labelled.
SspLabeling aggregate_labels(std::vector<SplitLabels> per_split, std::size_t n_columns);

} // namespace astres::split
