#pragma once

#include <string>

#include "astres/examples/store.hpp"
#include "astres/schema/catalog.hpp"
#include "astres/schema/subschema.hpp"

namespace fixtures {

inline constexpr const char *kDegreesQuestion = "How many degrees does the engineering department have?";

/// Departments and Degree_Programs of student_transcripts, with value
/// samples for the two name columns.
astres::schema::SchemaCatalog student_transcripts();

/// Every column of both tables except the two description columns; no
/// values selected yet.
astres::schema::SubSchema degrees_sub_schema(const astres::schema::SchemaCatalog &catalog);

/// Two examples in prompt order, the Computer Information Systems one first.
astres::examples::SelectionResult degrees_examples();

} // namespace fixtures
