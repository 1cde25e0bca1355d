#include <filesystem>

#include <gtest/gtest.h>

#include "astres/error.hpp"
#include "astres/eval/config.hpp"
#include "astres/eval/dataset.hpp"
#include "astres/eval/metrics.hpp"
#include "astres/eval/pipeline.hpp"
#include "astres/util/io.hpp"
#include "fixtures.hpp"

using namespace astres;
using namespace astres::eval;
using nlohmann::json;
using schema::ColumnId;
using schema::TableId;

namespace {

std::filesystem::path scratch(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("astres_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

const json kTables = json::parse(R"([{
  "db_id": "student_transcripts",
  "table_names_original": ["Departments", "Degree_Programs"],
  "table_names": ["departments", "degree programs"],
  "column_names_original": [[-1, "*"], [0, "department_id"], [0, "department_name"], [0, "department_description"],
                            [1, "degree_program_id"], [1, "department_id"], [1, "degree_summary_name"],
                            [1, "degree_summary_description"]],
  "column_names": [[-1, "*"], [0, "department id"], [0, "department name"], [0, "department description"],
                   [1, "degree program id"], [1, "department id"], [1, "degree summary name"],
                   [1, "degree summary description"]],
  "column_types": ["text", "number", "text", "text", "number", "number", "text", "text"],
  "primary_keys": [1, 4],
  "foreign_keys": [[5, 1]]
}])");

const json kValues = json::parse(R"({"student_transcripts": {
  "departments.department_name": ["engineer", "statistics", "medical"],
  "degree_programs.degree_summary_name": ["PHD", "Master", "Bachelor"]}})");

const char *kJoinGold = "SELECT T1.department_name FROM Departments AS T1 JOIN Degree_Programs AS T2 ON "
                        "T1.department_id = T2.department_id WHERE T2.degree_summary_name = 'PHD'";

std::filesystem::path write_dataset(const std::string &name, const json &samples,
                                    const json &difficulty = json()) {
  auto dir = scratch(name);
  util::write_file(dir / "tables.json", kTables.dump());
  util::write_file(dir / "values.json", kValues.dump());
  util::write_file(dir / "dev.json", samples.dump());
  if (!difficulty.is_null())
    util::write_file(dir / "difficulty.json", difficulty.dump());
  return dir;
}

json three_samples() {
  return json::array({
      {{"db_id", "student_transcripts"}, {"question", "How many departments are there?"},
       {"query", "SELECT count(*) FROM Departments"}},
      {{"db_id", "student_transcripts"}, {"question", "List degree summary names."},
       {"query", "SELECT degree_summary_name FROM Degree_Programs"}},
      {{"db_id", "student_transcripts"}, {"question", "Names of departments with a PHD program?"},
       {"query", kJoinGold}},
  });
}

class TableEmbedder : public examples::Embedder {
public:
  std::string id() const override { return "flat"; }
  std::vector<float> embed(const examples::EmbedRequest &) const override { return {1.0f, 0.0f}; }
};

// Answers by looking up the test question at the end of the prompt.
class ScriptedLlm : public prompt::LlmClient {
public:
  explicit ScriptedLlm(std::map<std::string, std::string> replies) : replies_(std::move(replies)) {}
  std::string id() const override { return "scripted"; }
  std::string generate(const std::string &prompt) const override {
    for (const auto &[q, r] : replies_)
      if (prompt.find("Question: " + q + "\nSQL:") != std::string::npos)
        return r;
    throw LookupMiss("unexpected prompt");
  }

private:
  std::map<std::string, std::string> replies_;
};

struct Toy {
  RunConfig config;
  Dataset data;
  Components comp;
};

Toy toy() {
  Toy t;
  t.data = ingest(write_dataset("toy3", three_samples(), json{{"dev_0000", "easy"}}));
  t.config.selection.mode = schema::SelectionMode::ApproxOnly;
  t.config.examples.e = 1;
  t.config.workers = 2;
  auto emb = std::make_shared<TableEmbedder>();
  t.comp.embedder = emb;
  t.comp.approximator = std::make_shared<split::OracleApproximator>();
  t.comp.index = std::make_shared<examples::ExampleIndex>(
      examples::build_index({{"r_col", "q", "SELECT a FROM x", "other"}, {"r_count", "q", "SELECT count(*) FROM x", "other"}},
                            *emb));
  t.comp.llm = std::make_shared<ScriptedLlm>(std::map<std::string, std::string>{
      {"How many departments are there?", "SELECT count(*) FROM Departments"},
      {"List degree summary names.", "SELECT degree_summary_description FROM Degree_Programs"},
      {"Names of departments with a PHD program?", "I cannot answer"},
  });
  return t;
}

} // namespace

TEST(Metrics, Recall) {
  auto cat = fixtures::student_transcripts();
  schema::SubSchema sub;
  sub.db_id = cat.db_id;
  sub.tables = {TableId{0}, TableId{1}};
  for (std::size_t c : {0, 1, 4, 5})
    sub.columns[ColumnId{c}] = schema::Provenance::Bm25;
  EXPECT_TRUE(recall_metric(cat, sub, kJoinGold));
  sub.columns[ColumnId{3}] = schema::Provenance::Bm25;
  EXPECT_TRUE(recall_metric(cat, sub, kJoinGold));
  sub.columns.erase(ColumnId{5});
  EXPECT_FALSE(recall_metric(cat, sub, kJoinGold));
  schema::SubSchema departments_only;
  departments_only.db_id = cat.db_id;
  departments_only.tables = {TableId{0}};
  departments_only.columns[ColumnId{0}] = schema::Provenance::Bm25;
  EXPECT_FALSE(recall_metric(cat, departments_only, "SELECT count(*) FROM Degree_Programs"));
  EXPECT_FALSE(recall_metric(cat, departments_only, "SELECT nope FROM Departments"));
}

TEST(Metrics, Shortening) {
  auto cat = fixtures::student_transcripts();
  auto sub = fixtures::degrees_sub_schema(cat);
  // 9 elements, the two description columns excluded.
  EXPECT_DOUBLE_EQ(shortening_metric(sub, cat), 2.0 / 9.0);
  for (std::size_t c = 0; c < 7; ++c)
    sub.columns[ColumnId{c}] = schema::Provenance::Full;
  EXPECT_DOUBLE_EQ(shortening_metric(sub, cat), 0.0);
}

TEST(Metrics, EmProxy) {
  EXPECT_TRUE(em_proxy(kJoinGold, kJoinGold));
  EXPECT_TRUE(em_proxy("SELECT a.department_name FROM Departments AS a JOIN Degree_Programs AS b ON "
                       "a.department_id = b.department_id WHERE b.degree_summary_name = 'PHD'",
                       kJoinGold));
  EXPECT_FALSE(em_proxy("SELECT name FROM t WHERE a = 1", "SELECT name FROM t"));
  EXPECT_FALSE(em_proxy("SELECT name FROM t WHERE a = 1", "SELECT name FROM t WHERE a = 2"));
  EXPECT_FALSE(em_proxy("garbage", "SELECT name FROM t"));
}

TEST(Metrics, Buckets) {
  EXPECT_EQ(kBucketLabels[ast_bucket(0.93)], "[0.9, 0.95)");
  EXPECT_EQ(ast_bucket(1.0), 0u);
  EXPECT_EQ(ast_bucket(0.95), 0u);
  EXPECT_EQ(ast_bucket(0.9), 1u);
  EXPECT_EQ(ast_bucket(0.85), 2u);
  EXPECT_EQ(ast_bucket(0.8), 3u);
  EXPECT_EQ(ast_bucket(0.7999), 4u);
  EXPECT_EQ(ast_bucket(0.0), 4u);
}

TEST(Config, DefaultsAndOverrides) {
  auto c = config_from_json(json::parse(R"({"dataset": "data/dev", "selection": {"mode": "bm25-topk", "k": 20},
                                            "llm": {"backend": "replay", "cache": "c.jsonl"}})"),
                            "/base");
  EXPECT_EQ(c.dataset, std::filesystem::path("/base/data/dev"));
  EXPECT_EQ(c.selection.mode, schema::SelectionMode::Bm25TopK);
  EXPECT_EQ(c.selection.k, 20u);
  EXPECT_EQ(c.examples.e, 5u);
  EXPECT_EQ(c.examples.pool, 500u);
  EXPECT_EQ(c.values_topk, 3u);
  EXPECT_EQ(c.split_r, 64u);
  EXPECT_EQ(c.llm.max_tokens, 256u);
  EXPECT_DOUBLE_EQ(c.bm25.k1, 1.5);
  EXPECT_DOUBLE_EQ(c.bm25.b, 0.75);
  EXPECT_EQ(c.llm.cache, "/base/c.jsonl");
  auto again = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, UnknownKeysAndBadTypes) {
  EXPECT_THROW(config_from_json(json::parse(R"({"dataset": "d", "datset": "x"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"dataset": "d", "llm": {"temprature": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"dataset": "d", "workers": "four"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"dataset": "d", "selection": {"mode": "magic"}})")), ConfigError);
}

TEST(Ingest, SpiderDevLayout) {
  auto data = ingest(ASTRES_SPIDER_DEV);
  EXPECT_EQ(data.samples.size(), 1034u);
  EXPECT_EQ(data.catalogs.size(), 20u);
  EXPECT_EQ(data.samples.front().id, "dev_0000");
  EXPECT_TRUE(data.issues.empty());
}

TEST(Ingest, UnknownDatabase) {
  auto samples = three_samples();
  samples.push_back({{"db_id", "atlantis"}, {"question", "q"}, {"query", "SELECT a FROM t"}});
  auto dir = write_dataset("unknown_db", samples);
  try {
    ingest(dir);
    FAIL() << "expected SchemaRefError";
  } catch (const SchemaRefError &e) {
    EXPECT_NE(std::string(e.what()).find("atlantis"), std::string::npos);
  }
  IngestOptions lenient;
  lenient.strict = false;
  auto data = ingest(dir, lenient);
  EXPECT_EQ(data.samples.size(), 3u);
  ASSERT_EQ(data.issues.size(), 1u);
  EXPECT_NE(data.issues[0].find("dev_0003"), std::string::npos);
}

TEST(Ingest, BadGoldSql) {
  auto samples = three_samples();
  samples[1]["query"] = "SELECT FROM WHERE";
  auto dir = write_dataset("bad_gold", samples);
  EXPECT_THROW(ingest(dir), ParseError);
  IngestOptions lenient;
  lenient.strict = false;
  EXPECT_EQ(ingest(dir, lenient).samples.size(), 2u);
}

TEST(Pipeline, EmptyDataset) {
  auto data = ingest(write_dataset("empty", json::array()));
  RunConfig config;
  auto report = run_pipeline(config, data, {});
  EXPECT_TRUE(report.records.empty());
  EXPECT_EQ(report.aggregates.n, 0u);
  EXPECT_EQ(report.aggregates.recall_pct, 0.0);
  EXPECT_EQ(report.aggregates.mean_shortening_pct, 0.0);
  EXPECT_EQ(report.aggregates.em_proxy_pct, 0.0);
}

TEST(Pipeline, UnknownDatabaseInHandBuiltDataset) {
  auto t = toy();
  t.data.samples[1].db_id = "atlantis";
  EXPECT_THROW(run_pipeline(t.config, t.data, t.comp), SchemaRefError);
}

TEST(Pipeline, ThreeSampleToy) {
  auto t = toy();
  std::vector<std::pair<std::string, std::string>> prompts;
  auto report = run_pipeline(t.config, t.data, t.comp, &prompts);
  ASSERT_EQ(report.records.size(), 3u);
  ASSERT_EQ(prompts.size(), 3u);
  const auto &r0 = report.records[0], &r1 = report.records[1], &r2 = report.records[2];

  EXPECT_EQ(r0.id, "dev_0000");
  EXPECT_EQ(r0.difficulty, Difficulty::Easy);
  EXPECT_EQ(r0.approx_sql, "SELECT count(*) FROM Departments");
  // Bare table: its primary key is the only column.
  EXPECT_EQ(r0.sub_schema, json::parse(R"({"tables": ["Departments"],
      "columns": [{"column": "Departments.department_id", "provenance": "key-completion"}], "values": {}})"));
  EXPECT_EQ(r0.recalled, true);
  EXPECT_DOUBLE_EQ(*r0.shortening, 7.0 / 9.0);
  ASSERT_EQ(r0.examples.size(), 1u);
  EXPECT_EQ(r0.examples[0].id, "r_count");
  EXPECT_DOUBLE_EQ(*r0.mean_ast_score, 1.0);
  EXPECT_EQ(r0.prediction, "SELECT count(*) FROM Departments");
  EXPECT_EQ(r0.em_proxy, true);
  EXPECT_EQ(r0.error, "");
  EXPECT_EQ(r0.prompt_sha256, util::sha256_hex(prompts[0].second));

  EXPECT_EQ(r1.difficulty, Difficulty::Unknown);
  EXPECT_EQ(r1.sub_schema, json::parse(R"({"tables": ["Degree_Programs"],
      "columns": [{"column": "Degree_Programs.degree_summary_name", "provenance": "approx-query"}],
      "values": {"Degree_Programs.degree_summary_name": {"values": ["PHD", "Master", "Bachelor"], "matched": false}}})"));
  EXPECT_DOUBLE_EQ(*r1.shortening, 7.0 / 9.0);
  EXPECT_EQ(r1.examples.at(0).id, "r_col");
  EXPECT_DOUBLE_EQ(*r1.mean_ast_score, 1.0);
  EXPECT_EQ(r1.em_proxy, false);
  EXPECT_EQ(r1.error, "");

  EXPECT_EQ(r2.recalled, true);
  EXPECT_DOUBLE_EQ(*r2.shortening, 3.0 / 9.0);
  // At most 5 of at least 15 operations align against either example.
  EXPECT_LT(*r2.mean_ast_score, 0.8);
  EXPECT_EQ(r2.raw_response, "I cannot answer");
  EXPECT_EQ(r2.prediction, "");
  EXPECT_EQ(r2.em_proxy, false);
  EXPECT_EQ(r2.error.rfind("extract: ", 0), 0u) << r2.error;
  EXPECT_EQ(r2.sub_schema.at("values").at("Degree_Programs.degree_summary_name").at("matched"), true);

  const auto &a = report.aggregates;
  EXPECT_EQ(a.n, 3u);
  EXPECT_EQ(a.n_failed, 1u);
  EXPECT_DOUBLE_EQ(a.recall_pct, 100.0);
  EXPECT_DOUBLE_EQ(a.mean_shortening_pct, 100.0 * (7.0 + 7.0 + 3.0) / 27.0);
  EXPECT_DOUBLE_EQ(a.em_proxy_pct, 100.0 / 3.0);
  EXPECT_EQ(a.buckets[0].n, 2u);
  EXPECT_EQ(a.buckets[0].em, 1u);
  EXPECT_EQ(a.buckets[4].n, 1u);
  EXPECT_EQ(a.buckets[4].em, 0u);
  EXPECT_EQ(a.by_difficulty.at("easy").n, 1u);
  EXPECT_EQ(a.by_difficulty.at("easy").em, 1u);
  EXPECT_EQ(a.by_difficulty.at("unknown").n, 2u);
}

TEST(Pipeline, ReportSelfConsistentAndStable) {
  auto t = toy();
  auto report = run_pipeline(t.config, t.data, t.comp);
  EXPECT_EQ(compute_aggregates(report.records), report.aggregates);
  auto j = report_to_json(report);
  auto back = report_from_json(j);
  EXPECT_EQ(back.aggregates, report.aggregates);
  EXPECT_EQ(report_to_json(back).dump(1), j.dump(1));
  t.config.workers = 1;
  auto serial = report_to_json(run_pipeline(t.config, t.data, t.comp));
  EXPECT_EQ(serial.at("samples").dump(1), j.at("samples").dump(1));
  EXPECT_EQ(serial.at("aggregates").dump(1), j.at("aggregates").dump(1));
}

TEST(Pipeline, ExportOfficial) {
  auto t = toy();
  auto report = run_pipeline(t.config, t.data, t.comp);
  auto dir = scratch("export");
  export_official(report, dir);
  EXPECT_EQ(util::read_file(dir / "pred.txt"), "SELECT count(*) FROM Departments\n"
                                               "SELECT degree_summary_description FROM Degree_Programs\n"
                                               "SELECT 1\n");
  EXPECT_EQ(util::read_file(dir / "gold.txt"),
            std::string("SELECT count(*) FROM Departments\tstudent_transcripts\n"
                        "SELECT degree_summary_name FROM Degree_Programs\tstudent_transcripts\n") +
                kJoinGold + "\tstudent_transcripts\n");
}
