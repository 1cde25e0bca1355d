#pragma once

#include <map>
#include <string_view>

#include "astres/schema/subschema.hpp"

namespace astres::schema {

/// Representative values for every selected column whose type is not
/// number. A value's score is the number of its distinct tokens present in
/// the question. Matched values come first (score descending, then
/// lexicographic); remaining slots take unmatched values in catalog order.
/// Columns without values are absent.
std::map<ColumnId, ValueSelection> select_values(const SchemaCatalog &catalog, const SubSchema &sub,
                                                 std::string_view question, std::size_t top_k = 3);

} // namespace astres::schema
