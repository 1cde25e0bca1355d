#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "astres/schema/catalog.hpp"

namespace astres::eval {

enum class Difficulty { Easy, Medium, Hard, Extra, Unknown };

std::string_view to_string(Difficulty d) noexcept;
Difficulty difficulty_from_string(std::string_view s) noexcept; // Unknown for anything else

struct DatasetSample {
  std::string id; // "<samples stem>_<4-digit position>"
  std::string db_id;
  std::string question;
  std::string gold_sql;
  Difficulty difficulty = Difficulty::Unknown;
};

struct IngestOptions {
  std::string samples_file = "dev.json";
  std::string tables_file = "tables.json";
  std::string values_file = "values.json";         // optional
  std::string difficulty_file = "difficulty.json"; // optional {id: "easy" | ...}
  std::size_t value_cap = 1000;
  bool strict = true;
};

struct Dataset {
  std::vector<DatasetSample> samples;
  std::map<std::string, schema::SchemaCatalog> catalogs;
  std::vector<std::string> issues; // rejected samples, non-strict mode only
};

/// Reads a Spider-layout directory. Every sample must name a known
/// database and carry parseable gold SQL; in strict mode the first
/// violation throws (SchemaRefError or ParseError), otherwise the sample
/// is dropped and described in `issues`.
Dataset ingest(const std::filesystem::path &dir, const IngestOptions &opts = {});

} // namespace astres::eval
