#include "astres/prompt/prompt.hpp"

#include "astres/error.hpp"
#include "astres/util/io.hpp"

namespace astres::prompt {

using schema::ColumnId;
using schema::TableId;

namespace {

std::string replace_underscores(std::string_view s, std::string_view with) {
  std::string out;
  for (char c : s) {
    if (c == '_')
      out += with;
    else
      out += c;
  }
  return out;
}

// Cut at a UTF-8 code point boundary.
std::string truncate_chars(const std::string &s, std::size_t max_chars) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) == 0x80)
      continue;
    if (chars == max_chars)
      return s.substr(0, i);
    ++chars;
  }
  return s;
}

std::string quote_comment(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "''";
    else if (c == '\n' || c == '\r')
      out += ' ';
    else
      out += c;
  }
  return out + "'";
}

std::string one_line(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = !out.empty();
      continue;
    }
    if (space)
      out += ' ';
    space = false;
    out += c;
  }
  return out;
}

} // namespace

bool semantic_name_derivable(std::string_view name, std::string_view semantic) {
  std::string lower = util::to_lower(name);
  return semantic == lower || semantic == replace_underscores(lower, "") ||
         semantic == replace_underscores(lower, " ");
}

std::string render_schema(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                          const PromptOptions &opts) {
  std::string out;
  for (TableId t : sub.tables) {
    const auto &table = catalog.table(t);
    std::vector<std::string> lines;
    for (ColumnId c : catalog.columns_of(t)) {
      if (!sub.has_column(c))
        continue;
      const auto &col = catalog.column(c);
      std::string line = opts.indent + col.name + " " + std::string(schema::to_string(col.type));
      std::string comment;
      if (!semantic_name_derivable(col.name, col.semantic_name))
        comment = col.semantic_name;
      auto v = sub.values.find(c);
      if (v != sub.values.end() && !v->second.values.empty()) {
        comment = col.semantic_name + " (e.g. ";
        for (std::size_t i = 0; i < v->second.values.size(); ++i) {
          if (i > 0)
            comment += ", ";
          comment += truncate_chars(v->second.values[i], opts.value_max_chars);
        }
        comment += ")";
      }
      if (!comment.empty())
        line += " COMMENT " + quote_comment(comment);
      lines.push_back(std::move(line));
    }

    std::string pk;
    for (ColumnId c : catalog.primary_keys)
      if (catalog.column(c).table == t && sub.has_column(c))
        pk += (pk.empty() ? "" : ", ") + catalog.column(c).name;
    if (!pk.empty())
      lines.push_back(opts.indent + "PRIMARY KEY (" + pk + ")");

    for (const auto &[from, to] : catalog.foreign_keys) {
      if (catalog.column(from).table != t || !sub.has_column(from) || !sub.has_column(to))
        continue;
      const auto &target = catalog.column(to);
      lines.push_back(opts.indent + "FOREIGN KEY (" + catalog.column(from).name + ") REFERENCES " +
                      catalog.table(target.table).name + "(" + target.name + ")");
    }

    out += "CREATE TABLE " + table.name + "(\n";
    for (std::size_t i = 0; i < lines.size(); ++i)
      out += lines[i] + (i + 1 < lines.size() ? ",\n" : "");
    out += ")";
    if (!semantic_name_derivable(table.name, table.semantic_name))
      out += " COMMENT " + quote_comment(table.semantic_name);
    out += ";\n";
  }
  return out;
}

PromptBundle render_prompt(const schema::SchemaCatalog &catalog, const schema::SubSchema &sub,
                           const examples::SelectionResult &examples, std::string_view question,
                           std::string_view db_id, const PromptOptions &opts) {
  if (sub.db_id != db_id || catalog.db_id != db_id)
    throw InconsistentBundle("sub-schema of '" + sub.db_id + "' and catalog of '" + catalog.db_id +
                             "' used for a prompt on '" + std::string(db_id) + "'");

  std::string text = "# Given SQLite database schema " + std::string(db_id) + ":\n";
  text += render_schema(catalog, sub, opts);
  text += "\n# Your task is to translate Question into SQL.\n";
  if (!examples.chosen.empty()) {
    text += "# Some examples are provided based on similar problems:\n";
    for (const auto &ex : examples.chosen)
      text += "Question: " + one_line(ex.question) + "\nSQL: " + one_line(ex.sql) + "\n";
  }
  text += "\n# Complete the following SQL for schema " + std::string(db_id) + ":\n";
  text += "Question: " + one_line(question) + "\nSQL:";

  return {std::move(text), sub, examples, std::string(question), std::string(db_id)};
}

} // namespace astres::prompt
