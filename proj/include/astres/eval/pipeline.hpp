#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "astres/eval/config.hpp"
#include "astres/eval/dataset.hpp"
#include "astres/examples/store.hpp"
#include "astres/prompt/llm.hpp"
#include "astres/split/approximator.hpp"

namespace astres::eval {

/// Backends a run needs. Null members disable the stage: no approximator
/// means no approximated query, no index means prompts without examples,
/// no llm means prompts are rendered but never sent.
struct Components {
  std::shared_ptr<const split::Approximator> approximator;
  std::shared_ptr<const examples::Embedder> embedder;
  std::shared_ptr<const examples::ExampleIndex> index;
  std::shared_ptr<const prompt::LlmClient> llm;
};

Components make_components(const RunConfig &config);

struct SampleRecord {
  std::string id;
  std::string db_id;
  Difficulty difficulty = Difficulty::Unknown;
  std::string question;
  std::string gold_sql;
  std::optional<std::string> approx_sql;
  std::string approx_error;
  std::optional<schema::SubSchema> sub; // not restored by report_from_json
  nlohmann::json sub_schema;            // tables, columns and values by name
  std::vector<examples::ChosenExample> examples;
  bool example_fallback = false;
  std::string prompt_sha256;
  std::string raw_response;
  std::string prediction;
  std::optional<bool> recalled;
  std::optional<double> shortening;
  std::optional<bool> em_proxy;
  std::optional<double> mean_ast_score;
  std::string error; // first failing stage, "stage: message"
};

struct BucketStats {
  std::size_t n = 0;
  std::size_t em = 0;
  friend bool operator==(const BucketStats &, const BucketStats &) = default;
};

/// Recall and EM proxy count every sample, a missing value as a miss;
/// shortening averages the samples that reached schema selection.
struct Aggregates {
  std::size_t n = 0;
  std::size_t n_failed = 0;
  double recall_pct = 0.0;
  double mean_shortening_pct = 0.0;
  double em_proxy_pct = 0.0;
  std::array<BucketStats, 5> buckets{};
  std::map<std::string, BucketStats> by_difficulty; // em counts per difficulty

  friend bool operator==(const Aggregates &, const Aggregates &) = default;
};

struct RunReport {
  nlohmann::json config;
  std::vector<SampleRecord> records; // sorted by id
  Aggregates aggregates;
  std::size_t network_calls = 0;
};

Aggregates compute_aggregates(const std::vector<SampleRecord> &records);

/// Runs every sample through approximation, schema and value selection,
/// example selection, prompting and scoring. Per-sample failures are
/// recorded and the run goes on. Prompts are written to `prompts` when
/// given, in record order.
RunReport run_pipeline(const RunConfig &config, const Dataset &data, const Components &components,
                       std::vector<std::pair<std::string, std::string>> *prompts = nullptr);

/// Loads the dataset and backends named by `config`, runs, and writes
/// report.json, summary.txt and prompts.jsonl under config.output.
RunReport run_pipeline(const RunConfig &config);

nlohmann::json report_to_json(const RunReport &report);
RunReport report_from_json(const nlohmann::json &j);
std::string summary_table(const RunReport &report);
void write_report(const RunReport &report, const std::filesystem::path &dir);

/// pred.txt (one prediction per line, "SELECT 1" standing in for failures)
/// and gold.txt ("SQL\tdb_id") in record order.
void export_official(const RunReport &report, const std::filesystem::path &dir);

} // namespace astres::eval
