#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "astres/schema/subschema.hpp"

namespace astres::eval {

/// True iff every table and column the gold query references is in `sub`.
/// Gold elements the catalog cannot resolve count as missed.
bool recall_metric(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                   std::string_view gold_sql);

/// (excluded tables + excluded columns) / (all tables + all columns).
double shortening_metric(const schema::SubSchema &sub, const schema::SchemaCatalog &catalog);

/// Equality of the in-domain normalized trees. Unparseable input on either
/// side compares unequal.
bool em_proxy(std::string_view pred_sql, std::string_view gold_sql);

/// AST-score intervals used in reports: [0.95, 1], [0.9, 0.95),
/// [0.85, 0.9), [0.8, 0.85), [0, 0.8).
inline constexpr std::array<std::string_view, 5> kBucketLabels = {
    "[0.95, 1.0]", "[0.9, 0.95)", "[0.85, 0.9)", "[0.8, 0.85)", "[0, 0.8)"};

std::size_t ast_bucket(double mean_score) noexcept;

} // namespace astres::eval
