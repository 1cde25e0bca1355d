#include "astres/eval/dataset.hpp"

#include <cstdio>

#include "astres/error.hpp"
#include "astres/sql/parser.hpp"
#include "astres/util/io.hpp"

namespace astres::eval {

std::string_view to_string(Difficulty d) noexcept {
  switch (d) {
  case Difficulty::Easy: return "easy";
  case Difficulty::Medium: return "medium";
  case Difficulty::Hard: return "hard";
  case Difficulty::Extra: return "extra";
  case Difficulty::Unknown: break;
  }
  return "unknown";
}

Difficulty difficulty_from_string(std::string_view s) noexcept {
  if (s == "easy") return Difficulty::Easy;
  if (s == "medium") return Difficulty::Medium;
  if (s == "hard") return Difficulty::Hard;
  if (s == "extra") return Difficulty::Extra;
  return Difficulty::Unknown;
}

Dataset ingest(const std::filesystem::path &dir, const IngestOptions &opts) {
  Dataset out;
  std::optional<std::filesystem::path> values;
  if (std::filesystem::exists(dir / opts.values_file))
    values = dir / opts.values_file;
  out.catalogs = schema::load_spider_catalogs(dir / opts.tables_file, values, opts.value_cap);
  for (const auto &[db, catalog] : out.catalogs)
    catalog.validate();

  nlohmann::json difficulty = nlohmann::json::object();
  if (std::filesystem::exists(dir / opts.difficulty_file))
    difficulty = util::read_json(dir / opts.difficulty_file);

  const auto raw = util::read_json(dir / opts.samples_file);
  if (!raw.is_array())
    throw IoError((dir / opts.samples_file).string() + ": expected a JSON array");
  const std::string stem = std::filesystem::path(opts.samples_file).stem().string();

  auto reject = [&](const std::string &msg, auto &&make_error) {
    if (opts.strict)
      throw make_error(msg);
    out.issues.push_back(msg);
  };

  for (std::size_t i = 0; i < raw.size(); ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    DatasetSample s;
    s.id = stem + "_" + buf;
    const auto &j = raw[i];
    try {
      s.db_id = j.at("db_id").get<std::string>();
      s.question = j.at("question").get<std::string>();
      s.gold_sql = j.at("query").get<std::string>();
    } catch (const nlohmann::json::exception &e) {
      reject(s.id + ": malformed sample: " + e.what(), [](const std::string &m) { return IoError(m); });
      continue;
    }
    if (!out.catalogs.count(s.db_id)) {
      reject(s.id + ": unknown database '" + s.db_id + "'",
             [](const std::string &m) { return SchemaRefError(m); });
      continue;
    }
    try {
      sql::parse_sql(s.gold_sql);
    } catch (const ParseError &e) {
      reject(s.id + ": gold SQL: " + e.what(), [&](const std::string &m) { return ParseError(m, e.offset()); });
      continue;
    } catch (const Error &e) {
      reject(s.id + ": gold SQL: " + e.what(), [](const std::string &m) { return ParseError(m, 0); });
      continue;
    }
    if (difficulty.contains(s.id))
      s.difficulty = difficulty_from_string(difficulty[s.id].get<std::string>());
    out.samples.push_back(std::move(s));
  }
  return out;
}

} // namespace astres::eval
