#pragma once

#include <map>
#include <string>
#include <string_view>

#include "astres/examples/store.hpp"
#include "astres/schema/catalog.hpp"
#include "astres/schema/subschema.hpp"

namespace astres::prompt {

struct PromptOptions {
  std::size_t value_max_chars = 64; // longer values are cut to this many characters
  std::string indent = "    ";
};

struct PromptBundle {
  std::string text;
  schema::SubSchema sub;
  examples::SelectionResult examples;
  std::string question;
  std::string db_id;
};

/// True when `semantic` adds nothing over `name`: it equals the name
/// lowercased, with underscores removed or replaced by spaces.
bool semantic_name_derivable(std::string_view name, std::string_view semantic);

/// CREATE TABLE block for the selected part of a catalog, values taken
/// from sub.values.
std::string render_schema(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                          const PromptOptions &opts = {});

/// Full prompt. Examples are rendered in the order given (least similar
/// first). Throws InconsistentBundle when the sub-schema or catalog belong
/// to a database other than db_id.
PromptBundle render_prompt(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                           const examples::SelectionResult &examples, std::string_view question,
                           std::string_view db_id, const PromptOptions &opts = {});

} // namespace astres::prompt
