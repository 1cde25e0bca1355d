#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "astres/error.hpp"
#include "astres/eval/config.hpp"
#include "astres/eval/dataset.hpp"
#include "astres/eval/pipeline.hpp"
#include "astres/examples/store.hpp"
#include "astres/util/io.hpp"

using namespace astres;

namespace {

int cmd_ingest(const std::string &dir, const std::string &samples, bool strict) {
  eval::IngestOptions opts;
  opts.samples_file = samples;
  opts.strict = strict;
  auto data = eval::ingest(dir, opts);
  std::cout << data.samples.size() << " samples over " << data.catalogs.size() << " databases\n";
  for (const auto &issue : data.issues)
    std::cout << "skipped " << issue << "\n";
  return 0;
}

std::vector<examples::ExamplePair> read_pairs(const std::filesystem::path &file) {
  auto j = util::read_json(file);
  if (!j.is_array())
    throw IoError(file.string() + ": expected a JSON array");
  const std::string stem = file.stem().string();
  std::vector<examples::ExamplePair> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto &s = j[i];
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    examples::ExamplePair p;
    p.id = s.contains("id") ? s["id"].get<std::string>() : stem + "_" + buf;
    p.question = s.at("question").get<std::string>();
    p.sql = s.contains("query") ? s["query"].get<std::string>() : s.at("sql").get<std::string>();
    p.db_id = s.value("db_id", "");
    out.push_back(std::move(p));
  }
  return out;
}

struct IndexArgs {
  std::string pairs;
  std::string out;
  std::string embedder = "hashing";
  std::size_t dim = 256;
  std::string path;
  std::string url;
  std::string model;
  std::size_t workers = 1;
};

int cmd_build_index(const IndexArgs &a) {
  std::unique_ptr<examples::Embedder> emb;
  if (a.embedder == "hashing")
    emb = std::make_unique<examples::HashingEmbedder>(a.dim);
  else if (a.embedder == "precomputed")
    emb = std::make_unique<examples::PrecomputedEmbedder>(a.path, a.model.empty() ? "precomputed" : a.model);
  else if (a.embedder == "remote")
    emb = std::make_unique<examples::RemoteEmbedder>(a.url, a.model, util::HttpOptions{});
  else
    throw ConfigError("unknown embedder '" + a.embedder + "'");
  auto index = examples::build_index(read_pairs(a.pairs), *emb, a.workers);
  index.save(a.out);
  std::cout << index.size() << " examples indexed with " << index.embedder_id() << " (dim " << index.dim()
            << ") in " << a.out << "\n";
  return 0;
}

struct RunArgs {
  std::string config;
  std::string output;
  std::size_t workers = 0;
  std::string selection_mode;
  std::string approximator_mode;
  std::string llm_backend;
};

int cmd_run(const RunArgs &a) {
  auto j = nlohmann::json::parse(util::read_file(a.config));
  if (!a.output.empty())
    j["output"] = std::filesystem::absolute(a.output).string();
  if (a.workers > 0)
    j["workers"] = a.workers;
  if (!a.selection_mode.empty())
    j["selection"]["mode"] = a.selection_mode;
  if (!a.approximator_mode.empty())
    j["approximator"]["mode"] = a.approximator_mode;
  if (!a.llm_backend.empty())
    j["llm"]["backend"] = a.llm_backend;
  auto config = eval::config_from_json(j, std::filesystem::path(a.config).parent_path());
  auto report = eval::run_pipeline(config);
  std::cout << eval::summary_table(report);
  std::cout << "report written to " << (config.output / "report.json").string() << "\n";
  const auto &agg = report.aggregates;
  if (agg.n > 0 && static_cast<double>(agg.n_failed) / agg.n > config.max_failure_fraction) {
    std::cerr << agg.n_failed << " of " << agg.n << " samples failed\n";
    return 3;
  }
  return 0;
}

int cmd_score(const std::string &report_path) {
  auto j = util::read_json(report_path);
  auto report = eval::report_from_json(j);
  std::cout << eval::summary_table(report);
  const auto &stored = j.at("aggregates");
  const auto &a = report.aggregates;
  bool consistent = stored.at("n").get<std::size_t>() == a.n &&
                    stored.at("n_failed").get<std::size_t>() == a.n_failed &&
                    stored.at("recall_pct").get<double>() == a.recall_pct &&
                    stored.at("mean_shortening_pct").get<double>() == a.mean_shortening_pct &&
                    stored.at("em_proxy_pct").get<double>() == a.em_proxy_pct;
  if (!consistent) {
    std::cerr << "stored aggregates differ from the per-sample records\n";
    return 4;
  }
  return 0;
}

int cmd_export(const std::string &report_path, const std::string &out) {
  auto report = eval::report_from_json(util::read_json(report_path));
  eval::export_official(report, out);
  std::cout << report.records.size() << " predictions written to " << out << "\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"astres: retrieval-augmented text-to-SQL pipeline"};
  app.require_subcommand(1);

  std::string dataset, samples = "dev.json";
  bool strict = true;
  auto *ingest = app.add_subcommand("ingest", "validate a Spider-layout dataset directory");
  ingest->add_option("--dataset", dataset, "dataset directory")->required();
  ingest->add_option("--samples", samples, "samples file inside the directory");
  ingest->add_flag("--strict,!--no-strict", strict, "abort on the first malformed sample");

  IndexArgs ia;
  auto *build = app.add_subcommand("build-index", "embed and parse an example pool");
  build->add_option("--pairs", ia.pairs, "JSON array of {question, query|sql, db_id?, id?}")->required();
  build->add_option("--out", ia.out, "index directory")->required();
  build->add_option("--embedder", ia.embedder, "hashing | precomputed | remote");
  build->add_option("--dim", ia.dim, "hashing embedder dimension");
  build->add_option("--vectors", ia.path, "precomputed vectors (JSON lines)");
  build->add_option("--url", ia.url, "remote embeddings endpoint");
  build->add_option("--model", ia.model, "remote model, or precomputed embedder id");
  build->add_option("--workers", ia.workers);

  RunArgs ra;
  auto *run = app.add_subcommand("run", "run the pipeline from a config file");
  run->add_option("--config", ra.config, "JSON run config")->required();
  run->add_option("--output", ra.output, "overrides output");
  run->add_option("--workers", ra.workers, "overrides workers");
  run->add_option("--selection-mode", ra.selection_mode, "overrides selection.mode");
  run->add_option("--approximator-mode", ra.approximator_mode, "overrides approximator.mode");
  run->add_option("--llm-backend", ra.llm_backend, "overrides llm.backend");

  std::string report_path, out;
  auto *score = app.add_subcommand("score", "recompute aggregates from a report");
  score->add_option("--report", report_path)->required();

  auto *exp = app.add_subcommand("export-official", "write pred.txt and gold.txt for the official scorer");
  exp->add_option("--report", report_path)->required();
  exp->add_option("--out", out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest)
      return cmd_ingest(dataset, samples, strict);
    if (*build)
      return cmd_build_index(ia);
    if (*run)
      return cmd_run(ra);
    if (*score)
      return cmd_score(report_path);
    if (*exp)
      return cmd_export(report_path, out);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
