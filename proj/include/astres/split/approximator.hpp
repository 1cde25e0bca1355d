#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "astres/schema/catalog.hpp"
#include "astres/split/split.hpp"
#include "astres/util/http.hpp"

namespace astres::split {

struct ApproxRequest {
  std::string sample_id;
  std::string question;
  const schema::SchemaCatalog *catalog = nullptr;
  std::optional<std::string> gold_sql; // oracle mode only
};

/// Produces a preliminary SQL query for a question.
class Approximator {
public:
  virtual ~Approximator() = default;
  virtual std::string name() const = 0;
  /// Throws ApproximatorUnavailable or LookupMiss.
  virtual std::string approximate(const ApproxRequest &req) const = 0;
};

class OracleApproximator : public Approximator {
public:
  std::string name() const override { return "oracle"; }
  std::string approximate(const ApproxRequest &req) const override;
};

/// Predictions from JSON-lines {"sample_id": ..., "sql": ...}.
class FileApproximator : public Approximator {
public:
  explicit FileApproximator(const std::filesystem::path &jsonl);
  std::string name() const override { return "file"; }
  std::string approximate(const ApproxRequest &req) const override;

private:
  std::unordered_map<std::string, std::string> by_id_;
};

/// POSTs {question, db_id, schema} and reads {sql}.
class RemoteApproximator : public Approximator {
public:
  RemoteApproximator(std::string url, util::HttpOptions opts);
  std::string name() const override { return "remote"; }
  std::string approximate(const ApproxRequest &req) const override;

private:
  std::string url_;
  util::HttpOptions opts_;
};

/// Per-split labelling model plus the deterministic label-to-SQL
/// constructor that goes with it.
class LabelSource {
public:
  virtual ~LabelSource() = default;
  virtual SspLabeling label(const SchemaSplit &split, const ApproxRequest &req) const = 0;
  virtual std::string construct_sql(const SspLabeling &labels, const ApproxRequest &req) const = 0;
};

/// Label source behind two endpoints: `label_url` receives
/// {question, db_id, split_index, tokens, column_positions} and answers
/// {column_labels: {pos: label}, table_labels: {idx: label}};
/// `construct_url` receives {question, db_id, column_labels, table_labels}
/// and answers {sql}.
class RemoteLabelSource : public LabelSource {
public:
  RemoteLabelSource(std::string label_url, std::string construct_url, util::HttpOptions opts,
                    std::optional<std::string> separator = std::nullopt);
  SspLabeling label(const SchemaSplit &split, const ApproxRequest &req) const override;
  std::string construct_sql(const SspLabeling &labels, const ApproxRequest &req) const override;

private:
  std::string label_url_;
  std::string construct_url_;
  util::HttpOptions opts_;
  std::optional<std::string> separator_;
};

/// Splits the catalog with at most r columns per split, labels splits
/// concurrently, aggregates with majority voting and builds the SQL.
class SplitLabelerApproximator : public Approximator {
public:
  SplitLabelerApproximator(std::shared_ptr<const LabelSource> source, std::size_t r = 64,
                           std::size_t workers = 1);
  std::string name() const override { return "split-labeler"; }
  std::string approximate(const ApproxRequest &req) const override;

  /// The splitting and aggregation steps on their own.
  SspLabeling labels(const ApproxRequest &req) const;

private:
  std::shared_ptr<const LabelSource> source_;
  std::size_t r_;
  std::size_t workers_;
};

/// Splits of a catalog: question words, raw column names and raw table
/// names each broken into lowercase words.
std::vector<SchemaSplit> split_catalog(const schema::SchemaCatalog &catalog, std::string_view question,
                                       std::size_t r);

/// JSON form of a catalog sent to remote endpoints.
nlohmann::json catalog_to_json(const schema::SchemaCatalog &catalog);

} // namespace astres::split
