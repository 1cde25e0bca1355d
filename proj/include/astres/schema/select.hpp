#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "astres/schema/bm25.hpp"
#include "astres/schema/subschema.hpp"

namespace astres::schema {

/// clamp(floor(1.5 * gamma), 6, 20)
std::size_t dynamic_k(std::size_t gamma) noexcept;

/// dynamic_k of the number of distinct columns in `approx_sql`.
/// Throws ParseError.
std::size_t dynamic_k_for(std::string_view approx_sql);

enum class SelectionMode { Bm25TopK, ApproxOnly, HybridDynamic, Full };

std::string_view to_string(SelectionMode m) noexcept;
SelectionMode selection_mode_from_string(std::string_view s);

struct SelectionConfig {
  SelectionMode mode = SelectionMode::HybridDynamic;
  std::size_t k = 10; // bm25-topk only
};

/// Adds primary keys of the selected tables and both ends of foreign keys
/// whose tables are both selected. Added columns carry KeyCompletion.
void complete_keys(const SchemaCatalog &catalog, SubSchema &sub);

/// Sub-schema for one question.
///   bm25-topk:      top-k BM25 columns, then key completion
///   approx-only:    elements of approx_sql; tables it names without any
///                   selected column get their primary keys
///   hybrid-dynamic: approx elements plus the top dynamic_k BM25 columns,
///                   then key completion
///   full:           the whole catalog
/// Throws ModeMismatch when approx_sql is required but absent and
/// ParseError when it does not parse.
SubSchema select_sub_schema(const SchemaCatalog &catalog, const ColumnIndex &index,
                            std::string_view question, const std::optional<std::string> &approx_sql,
                            const SelectionConfig &config);

/// Restricts `catalog` to `sub`, keeping keys whose columns survive.
/// Column and table ids are renumbered.
SchemaCatalog prune(const SchemaCatalog &catalog, const SubSchema &sub);

} // namespace astres::schema
