#include "astres/split/approximator.hpp"

#include <fstream>

#include "astres/error.hpp"
#include "astres/text/tokenize.hpp"
#include "astres/util/parallel.hpp"

namespace astres::split {

using nlohmann::json;

std::string OracleApproximator::approximate(const ApproxRequest &req) const {
  if (!req.gold_sql)
    throw ApproximatorUnavailable("oracle approximator has no gold SQL for '" + req.sample_id + "'");
  return *req.gold_sql;
}

FileApproximator::FileApproximator(const std::filesystem::path &jsonl) {
  std::ifstream in(jsonl);
  if (!in)
    throw ApproximatorUnavailable("cannot open predictions file " + jsonl.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = json::parse(line);
      by_id_[j.at("sample_id").get<std::string>()] = j.at("sql").get<std::string>();
    } catch (const json::exception &e) {
      throw ApproximatorUnavailable(jsonl.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::string FileApproximator::approximate(const ApproxRequest &req) const {
  auto it = by_id_.find(req.sample_id);
  if (it == by_id_.end())
    throw LookupMiss("no approximated query for sample '" + req.sample_id + "'");
  return it->second;
}

json catalog_to_json(const schema::SchemaCatalog &catalog) {
  json tables = json::array();
  for (std::size_t t = 0; t < catalog.tables.size(); ++t) {
    json cols = json::array();
    for (auto c : catalog.columns_of(schema::TableId{t}))
      cols.push_back({{"name", catalog.column(c).name},
                      {"type", schema::to_string(catalog.column(c).type)}});
    tables.push_back({{"name", catalog.tables[t].name}, {"columns", cols}});
  }
  auto ref = [&](schema::ColumnId c) {
    return json::array({catalog.table(catalog.column(c).table).name, catalog.column(c).name});
  };
  json pks = json::array(), fks = json::array();
  for (auto pk : catalog.primary_keys)
    pks.push_back(ref(pk));
  for (const auto &[a, b] : catalog.foreign_keys)
    fks.push_back(json::array({ref(a), ref(b)}));
  return {{"tables", tables}, {"primary_keys", pks}, {"foreign_keys", fks}};
}

RemoteApproximator::RemoteApproximator(std::string url, util::HttpOptions opts)
    : url_(std::move(url)), opts_(std::move(opts)) {}

std::string RemoteApproximator::approximate(const ApproxRequest &req) const {
  if (!req.catalog)
    throw ApproximatorUnavailable("remote approximator needs a catalog");
  json body = {{"question", req.question},
               {"db_id", req.catalog->db_id},
               {"schema", catalog_to_json(*req.catalog)}};
  try {
    return util::post_json(url_, body, opts_).at("sql").get<std::string>();
  } catch (const EndpointError &e) {
    throw ApproximatorUnavailable(e.what());
  } catch (const json::exception &e) {
    throw ApproximatorUnavailable(url_ + ": reply lacks a string 'sql': " + e.what());
  }
}

RemoteLabelSource::RemoteLabelSource(std::string label_url, std::string construct_url,
                                     util::HttpOptions opts, std::optional<std::string> separator)
    : label_url_(std::move(label_url)), construct_url_(std::move(construct_url)),
      opts_(std::move(opts)), separator_(std::move(separator)) {}

namespace {

std::map<std::size_t, std::string> index_map(const json &j) {
  std::map<std::size_t, std::string> out;
  for (const auto &[k, v] : j.items())
    out.emplace(std::stoul(k), v.get<std::string>());
  return out;
}

json label_map(const std::map<std::size_t, std::string> &m) {
  json out = json::object();
  for (const auto &[k, v] : m)
    out[std::to_string(k)] = v;
  return out;
}

} // namespace

SspLabeling RemoteLabelSource::label(const SchemaSplit &split, const ApproxRequest &req) const {
  json body = {{"question", req.question},
               {"db_id", req.catalog ? req.catalog->db_id : ""},
               {"split_index", split.index},
               {"tokens", split.tokens(separator_)},
               {"column_positions", split.column_positions}};
  try {
    json reply = util::post_json(label_url_, body, opts_);
    return {index_map(reply.at("column_labels")), index_map(reply.at("table_labels"))};
  } catch (const EndpointError &e) {
    throw ApproximatorUnavailable(e.what());
  } catch (const std::exception &e) {
    throw ApproximatorUnavailable(label_url_ + ": malformed label reply: " + e.what());
  }
}

std::string RemoteLabelSource::construct_sql(const SspLabeling &labels, const ApproxRequest &req) const {
  json body = {{"question", req.question},
               {"db_id", req.catalog ? req.catalog->db_id : ""},
               {"column_labels", label_map(labels.column_labels)},
               {"table_labels", label_map(labels.table_labels)}};
  try {
    return util::post_json(construct_url_, body, opts_).at("sql").get<std::string>();
  } catch (const EndpointError &e) {
    throw ApproximatorUnavailable(e.what());
  } catch (const json::exception &e) {
    throw ApproximatorUnavailable(construct_url_ + ": reply lacks a string 'sql': " + e.what());
  }
}

std::vector<SchemaSplit> split_catalog(const schema::SchemaCatalog &catalog, std::string_view question,
                                       std::size_t r) {
  std::vector<TokenGroup> cols, tables;
  for (const auto &c : catalog.columns)
    cols.push_back(text::split_words(c.name));
  for (const auto &t : catalog.tables)
    tables.push_back(text::split_words(t.name));
  return split_schema(text::split_words(question), cols, tables, r);
}

SplitLabelerApproximator::SplitLabelerApproximator(std::shared_ptr<const LabelSource> source,
                                                   std::size_t r, std::size_t workers)
    : source_(std::move(source)), r_(r), workers_(workers) {
  if (!source_)
    throw ApproximatorUnavailable("split-labeler needs a label source");
  if (r_ < 1)
    throw InvalidR("r must be at least 1");
}

SspLabeling SplitLabelerApproximator::labels(const ApproxRequest &req) const {
  if (!req.catalog)
    throw ApproximatorUnavailable("split-labeler needs a catalog");
  auto splits = split_catalog(*req.catalog, req.question, r_);
  std::vector<SplitLabels> per_split(splits.size());
  util::parallel_for(splits.size(), workers_, [&](std::size_t i) {
    per_split[i] = {splits[i].index, source_->label(splits[i], req)};
  });
  return aggregate_labels(std::move(per_split), req.catalog->columns.size());
}

std::string SplitLabelerApproximator::approximate(const ApproxRequest &req) const {
  return source_->construct_sql(labels(req), req);
}

} // namespace astres::split
