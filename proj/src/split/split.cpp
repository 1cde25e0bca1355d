#include "astres/split/split.hpp"

#include <algorithm>
#include <stdexcept>

#include "astres/error.hpp"

namespace astres::split {

std::string_view to_string(CompletionToken t) noexcept {
  return t == CompletionToken::FullSchema ? "[full_schema]" : "[part_schema]";
}

std::vector<std::string> SchemaSplit::tokens(const std::optional<std::string> &separator) const {
  std::vector<std::string> out = question_tokens;
  out.emplace_back(to_string(completion_token));
  for (std::size_t i = 0; i < column_slice.size(); ++i) {
    if (i > 0 && separator)
      out.push_back(*separator);
    out.insert(out.end(), column_slice[i].begin(), column_slice[i].end());
  }
  for (const auto &t : table_tokens)
    out.insert(out.end(), t.begin(), t.end());
  return out;
}

std::vector<SchemaSplit> split_schema(const std::vector<std::string> &question_tokens,
                                      const std::vector<TokenGroup> &column_tokens,
                                      const std::vector<TokenGroup> &table_tokens, std::size_t r) {
  if (r < 1)
    throw InvalidR("r must be at least 1");
  if (column_tokens.empty())
    throw std::invalid_argument("split_schema needs at least one column");

  const std::size_t n = column_tokens.size();
  const CompletionToken flag = n > r ? CompletionToken::PartSchema : CompletionToken::FullSchema;
  std::vector<SchemaSplit> splits;
  SchemaSplit sp{splits.size(), question_tokens, flag, {}, {}, {}};
  for (std::size_t j = 1; j <= n; ++j) {
    sp.column_slice.push_back(column_tokens[j - 1]);
    sp.column_positions.push_back(j - 1);
    if (j % r == 0 || j == n) {
      sp.table_tokens = table_tokens;
      splits.push_back(std::move(sp));
      sp = SchemaSplit{splits.size(), question_tokens, flag, {}, {}, {}};
    }
  }
  return splits;
}

SspLabeling aggregate_labels(std::vector<SplitLabels> per_split, std::size_t n_columns) {
  std::stable_sort(per_split.begin(), per_split.end(),
                   [](const SplitLabels &a, const SplitLabels &b) { return a.split_index < b.split_index; });
  per_split.erase(std::unique(per_split.begin(), per_split.end(),
                              [](const SplitLabels &a, const SplitLabels &b) {
                                return a.split_index == b.split_index;
                              }),
                  per_split.end());

  SspLabeling out;
  struct Vote {
    std::size_t count = 0;
    std::size_t first_split = 0;
  };
  std::map<std::size_t, std::map<std::string, Vote>> votes;
  for (const auto &s : per_split) {
    for (const auto &[col, label] : s.labels.column_labels)
      out.column_labels.emplace(col, label);
    for (const auto &[table, label] : s.labels.table_labels) {
      auto [it, fresh] = votes[table].try_emplace(label, Vote{0, s.split_index});
      ++it->second.count;
    }
  }
  for (std::size_t c = 0; c < n_columns; ++c)
    if (!out.column_labels.count(c))
      throw MissingColumn("no split labelled column " + std::to_string(c));

  for (const auto &[table, by_label] : votes) {
    const std::string *best = nullptr;
    Vote best_vote;
    for (const auto &[label, v] : by_label) {
      if (!best || v.count > best_vote.count ||
          (v.count == best_vote.count && v.first_split < best_vote.first_split)) {
        best = &label;
        best_vote = v;
      }
    }
    out.table_labels.emplace(table, *best);
  }
  return out;
}

} // namespace astres::split
