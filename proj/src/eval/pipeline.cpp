#include "astres/eval/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "astres/error.hpp"
#include "astres/eval/metrics.hpp"
#include "astres/prompt/prompt.hpp"
#include "astres/schema/values.hpp"
#include "astres/sql/parser.hpp"
#include "astres/util/io.hpp"
#include "astres/util/parallel.hpp"

namespace astres::eval {

using nlohmann::json;

Components make_components(const RunConfig &c) {
  Components out;
  util::HttpOptions http;

  const auto &a = c.approximator;
  if (a.mode == "oracle")
    out.approximator = std::make_shared<split::OracleApproximator>();
  else if (a.mode == "file")
    out.approximator = std::make_shared<split::FileApproximator>(a.path);
  else if (a.mode == "remote")
    out.approximator = std::make_shared<split::RemoteApproximator>(a.url, http);
  else if (a.mode == "split-labeler")
    out.approximator = std::make_shared<split::SplitLabelerApproximator>(
        std::make_shared<split::RemoteLabelSource>(a.label_url, a.construct_url, http, a.separator), c.split_r,
        c.workers);

  if (c.index) {
    out.index = std::make_shared<examples::ExampleIndex>(examples::ExampleIndex::load(*c.index));
    const auto &e = c.embedder;
    if (e.backend == "hashing")
      out.embedder = std::make_shared<examples::HashingEmbedder>(e.dim);
    else if (e.backend == "precomputed")
      out.embedder = std::make_shared<examples::PrecomputedEmbedder>(e.path, out.index->embedder_id());
    else
      out.embedder = std::make_shared<examples::RemoteEmbedder>(e.url, e.model, http);
    if (out.embedder->id() != out.index->embedder_id())
      throw EmbedderUnavailable("index was built with '" + out.index->embedder_id() + "' but the run uses '" +
                                out.embedder->id() + "'");
  }

  const auto &l = c.llm;
  if (l.backend != "none") {
    std::shared_ptr<const prompt::LlmClient> remote;
    if (l.backend == "remote-chat") {
      prompt::ChatOptions opts;
      opts.model = l.model;
      opts.max_tokens = l.max_tokens;
      opts.max_in_flight = l.max_in_flight;
      opts.http.bearer_env = l.token_env;
      remote = std::make_shared<prompt::RemoteChatClient>(l.url, opts);
    }
    if (!l.cache.empty())
      out.llm = std::make_shared<prompt::ReplayClient>(l.cache, remote);
    else if (remote)
      out.llm = remote;
    else
      throw ConfigError("llm.backend 'replay' needs llm.cache");
  }
  return out;
}

namespace {

std::string error_text(const char *stage, const std::exception &e) { return std::string(stage) + ": " + e.what(); }

json sub_to_json(const schema::SubSchema &sub, const schema::SchemaCatalog &catalog) {
  json tables = json::array(), columns = json::array(), values = json::object();
  auto col_name = [&](schema::ColumnId c) {
    const auto &col = catalog.column(c);
    return catalog.table(col.table).name + "." + col.name;
  };
  for (auto t : sub.tables)
    tables.push_back(catalog.table(t).name);
  for (const auto &[c, p] : sub.columns)
    columns.push_back({{"column", col_name(c)}, {"provenance", schema::to_string(p)}});
  for (const auto &[c, v] : sub.values)
    values[col_name(c)] = {{"values", v.values}, {"matched", v.matched}};
  return {{"tables", tables}, {"columns", columns}, {"values", values}};
}

void run_sample(const RunConfig &cfg, const Components &comp, const DatasetSample &s,
                const schema::SchemaCatalog &catalog, const schema::ColumnIndex &bm25, SampleRecord &rec,
                std::string &prompt_text) {
  rec.id = s.id;
  rec.db_id = s.db_id;
  rec.difficulty = s.difficulty;
  rec.question = s.question;
  rec.gold_sql = s.gold_sql;

  if (comp.approximator) {
    try {
      rec.approx_sql = comp.approximator->approximate({s.id, s.question, &catalog, s.gold_sql});
    } catch (const std::exception &e) {
      rec.approx_error = e.what();
    }
  }

  schema::SelectionConfig sel = cfg.selection;
  if (cfg.cross_lingual)
    sel.mode = schema::SelectionMode::Full;
  try {
    rec.sub = schema::select_sub_schema(catalog, bm25, s.question, rec.approx_sql, sel);
    if (!cfg.cross_lingual)
      rec.sub->values = schema::select_values(catalog, *rec.sub, s.question, cfg.values_topk);
  } catch (const std::exception &e) {
    rec.error = error_text("selection", e);
    return;
  }
  rec.sub_schema = sub_to_json(*rec.sub, catalog);
  rec.recalled = recall_metric(catalog, *rec.sub, s.gold_sql);
  rec.shortening = shortening_metric(*rec.sub, catalog);

  examples::SelectionResult chosen;
  if (comp.index && cfg.examples.e > 0) {
    try {
      examples::RetrieveOptions ro;
      ro.pool = cfg.examples.pool;
      if (cfg.examples.exclude_same_db)
        ro.exclude_db = s.db_id;
      chosen = examples::select_examples(*comp.index, *comp.embedder, {s.id, s.question}, rec.approx_sql,
                                         cfg.examples.e, ro);
    } catch (const std::exception &e) {
      rec.error = error_text("examples", e);
      return;
    }
    rec.examples = chosen.chosen;
    rec.example_fallback = chosen.fallback;
    if (!chosen.chosen.empty()) {
      double sum = 0.0;
      for (const auto &c : chosen.chosen)
        sum += c.ast_score;
      rec.mean_ast_score = sum / static_cast<double>(chosen.chosen.size());
    }
  }

  prompt::PromptBundle bundle;
  try {
    bundle = prompt::render_prompt(catalog, *rec.sub, chosen, s.question, s.db_id);
  } catch (const std::exception &e) {
    rec.error = error_text("prompt", e);
    return;
  }
  rec.prompt_sha256 = util::sha256_hex(bundle.text);
  prompt_text = bundle.text;

  if (!comp.llm)
    return;
  try {
    rec.raw_response = comp.llm->generate(bundle.text);
  } catch (const std::exception &e) {
    rec.error = error_text("llm", e);
    return;
  }
  try {
    rec.prediction = prompt::extract_sql(rec.raw_response);
  } catch (const std::exception &e) {
    rec.error = error_text("extract", e);
    rec.em_proxy = false;
    return;
  }
  rec.em_proxy = em_proxy(rec.prediction, s.gold_sql);
}

double pct(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / den; }

json opt(const std::optional<bool> &v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }


} // namespace

Aggregates compute_aggregates(const std::vector<SampleRecord> &records) {
  Aggregates a;
  a.n = records.size();
  std::size_t recalled = 0, em = 0, n_short = 0;
  double short_sum = 0.0;
  for (const auto &r : records) {
    if (!r.error.empty())
      ++a.n_failed;
    bool hit = r.em_proxy.value_or(false);
    recalled += r.recalled.value_or(false);
    em += hit;
    if (r.shortening) {
      short_sum += *r.shortening;
      ++n_short;
    }
    if (r.mean_ast_score) {
      auto &b = a.buckets[ast_bucket(*r.mean_ast_score)];
      ++b.n;
      b.em += hit;
    }
    auto &d = a.by_difficulty[std::string(to_string(r.difficulty))];
    ++d.n;
    d.em += hit;
  }
  a.recall_pct = pct(recalled, a.n);
  a.em_proxy_pct = pct(em, a.n);
  a.mean_shortening_pct = n_short == 0 ? 0.0 : 100.0 * short_sum / static_cast<double>(n_short);
  return a;
}

RunReport run_pipeline(const RunConfig &config, const Dataset &data, const Components &components,
                       std::vector<std::pair<std::string, std::string>> *prompts) {
  std::map<std::string, schema::ColumnIndex> indexes;
  for (const auto &[db, catalog] : data.catalogs)
    indexes.emplace(db, schema::ColumnIndex(catalog, config.bm25));
  for (const auto &s : data.samples)
    if (!data.catalogs.count(s.db_id))
      throw SchemaRefError("sample " + s.id + " references unknown database '" + s.db_id + "'");

  std::vector<SampleRecord> records(data.samples.size());
  std::vector<std::string> texts(data.samples.size());
  util::parallel_for(data.samples.size(), config.workers, [&](std::size_t i) {
    const auto &s = data.samples[i];
    run_sample(config, components, s, data.catalogs.at(s.db_id), indexes.at(s.db_id), records[i], texts[i]);
  });

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return records[a].id < records[b].id; });

  RunReport report;
  report.config = config_to_json(config);
  for (auto i : order) {
    if (prompts)
      prompts->emplace_back(records[i].id, std::move(texts[i]));
    report.records.push_back(std::move(records[i]));
  }
  report.aggregates = compute_aggregates(report.records);
  report.network_calls = components.llm ? components.llm->network_calls() : 0;

  return report;
}

json report_to_json(const RunReport &report) {
  json records = json::array();
  for (const auto &r : report.records) {
    json ex = json::array();
    for (const auto &e : r.examples)
      ex.push_back({{"id", e.id}, {"ast_score", e.ast_score}, {"question_rank", e.question_rank}});
    records.push_back({{"id", r.id},
                       {"db_id", r.db_id},
                       {"difficulty", to_string(r.difficulty)},
                       {"question", r.question},
                       {"gold_sql", r.gold_sql},
                       {"approx_sql", r.approx_sql ? json(*r.approx_sql) : json(nullptr)},
                       {"approx_error", r.approx_error},
                       {"sub_schema", r.sub_schema},
                       {"examples", ex},
                       {"example_fallback", r.example_fallback},
                       {"prompt_sha256", r.prompt_sha256},
                       {"raw_response", r.raw_response},
                       {"prediction", r.prediction},
                       {"recalled", opt(r.recalled)},
                       {"shortening", opt(r.shortening)},
                       {"em_proxy", opt(r.em_proxy)},
                       {"mean_ast_score", opt(r.mean_ast_score)},
                       {"error", r.error}});
  }
  const auto &a = report.aggregates;
  json buckets = json::array();
  for (std::size_t i = 0; i < a.buckets.size(); ++i)
    buckets.push_back({{"interval", kBucketLabels[i]},
                       {"n", a.buckets[i].n},
                       {"em_proxy_pct", pct(a.buckets[i].em, a.buckets[i].n)}});
  json diff = json::object();
  for (const auto &[k, v] : a.by_difficulty)
    diff[k] = {{"n", v.n}, {"em_proxy_pct", pct(v.em, v.n)}};
  return {{"config", report.config},
          {"aggregates",
           {{"n", a.n},
            {"n_failed", a.n_failed},
            {"recall_pct", a.recall_pct},
            {"mean_shortening_pct", a.mean_shortening_pct},
            {"em_proxy_pct", a.em_proxy_pct},
            {"ast_buckets", buckets},
            {"by_difficulty", diff},
            {"network_calls", report.network_calls}}},
          {"samples", records}};
}

RunReport report_from_json(const json &j) {
  RunReport out;
  out.config = j.value("config", json::object());
  auto get_opt_bool = [](const json &v) { return v.is_null() ? std::optional<bool>() : v.get<bool>(); };
  auto get_opt_double = [](const json &v) { return v.is_null() ? std::optional<double>() : v.get<double>(); };
  for (const auto &s : j.at("samples")) {
    SampleRecord r;
    r.id = s.at("id").get<std::string>();
    r.db_id = s.at("db_id").get<std::string>();
    r.difficulty = difficulty_from_string(s.at("difficulty").get<std::string>());
    r.question = s.at("question").get<std::string>();
    r.gold_sql = s.at("gold_sql").get<std::string>();
    if (!s.at("approx_sql").is_null())
      r.approx_sql = s.at("approx_sql").get<std::string>();
    r.approx_error = s.at("approx_error").get<std::string>();
    r.sub_schema = s.at("sub_schema");
    for (const auto &e : s.at("examples")) {
      examples::ChosenExample c;
      c.id = e.at("id").get<std::string>();
      c.ast_score = e.at("ast_score").get<double>();
      c.question_rank = e.at("question_rank").get<std::size_t>();
      r.examples.push_back(std::move(c));
    }
    r.example_fallback = s.at("example_fallback").get<bool>();
    r.prompt_sha256 = s.at("prompt_sha256").get<std::string>();
    r.raw_response = s.at("raw_response").get<std::string>();
    r.prediction = s.at("prediction").get<std::string>();
    r.recalled = get_opt_bool(s.at("recalled"));
    r.shortening = get_opt_double(s.at("shortening"));
    r.em_proxy = get_opt_bool(s.at("em_proxy"));
    r.mean_ast_score = get_opt_double(s.at("mean_ast_score"));
    r.error = s.at("error").get<std::string>();
    out.records.push_back(std::move(r));
  }
  out.aggregates = compute_aggregates(out.records);
  out.network_calls = j.at("aggregates").value("network_calls", std::size_t{0});
  return out;
}

std::string summary_table(const RunReport &report) {
  const auto &a = report.aggregates;
  std::ostringstream os;
  char buf[128];
  os << "metric                 value\n";
  std::snprintf(buf, sizeof buf, "samples                %zu\n", a.n);
  os << buf;
  std::snprintf(buf, sizeof buf, "failed                 %zu\n", a.n_failed);
  os << buf;
  std::snprintf(buf, sizeof buf, "recall %%               %.2f\n", a.recall_pct);
  os << buf;
  std::snprintf(buf, sizeof buf, "mean shortening %%      %.2f\n", a.mean_shortening_pct);
  os << buf;
  std::snprintf(buf, sizeof buf, "EM proxy %%             %.2f\n", a.em_proxy_pct);
  os << buf;
  std::snprintf(buf, sizeof buf, "network calls          %zu\n", report.network_calls);
  os << buf;
  os << "\nAST interval           n      EM proxy %\n";
  for (std::size_t i = 0; i < a.buckets.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%-22s %-6zu %.2f\n", std::string(kBucketLabels[i]).c_str(), a.buckets[i].n,
                  pct(a.buckets[i].em, a.buckets[i].n));
    os << buf;
  }
  os << "\ndifficulty             n      EM proxy %\n";
  for (const auto &[k, v] : a.by_difficulty) {
    std::snprintf(buf, sizeof buf, "%-22s %-6zu %.2f\n", k.c_str(), v.n, pct(v.em, v.n));
    os << buf;
  }
  return os.str();
}

void write_report(const RunReport &report, const std::filesystem::path &dir) {
  util::write_file(dir / "report.json", report_to_json(report).dump(1) + "\n");
  util::write_file(dir / "summary.txt", summary_table(report));
}

RunReport run_pipeline(const RunConfig &config) {
  IngestOptions io;
  io.samples_file = config.samples;
  io.strict = config.strict;
  Dataset data = ingest(config.dataset, io);
  Components comp = make_components(config);
  std::vector<std::pair<std::string, std::string>> prompts;
  RunReport report = run_pipeline(config, data, comp, &prompts);

  write_report(report, config.output);
  std::string lines;
  for (const auto &[id, text] : prompts)
    lines += json{{"id", id}, {"sha256", text.empty() ? "" : util::sha256_hex(text)}, {"prompt", text}}.dump() + "\n";
  util::write_file(config.output / "prompts.jsonl", lines);
  return report;
}

void export_official(const RunReport &report, const std::filesystem::path &dir) {
  auto one_line = [](std::string s) {
    for (auto &c : s)
      if (c == '\n' || c == '\r' || c == '\t')
        c = ' ';
    return s;
  };
  std::string pred, gold;
  for (const auto &r : report.records) {
    pred += (r.prediction.empty() ? std::string("SELECT 1") : one_line(r.prediction)) + "\n";
    gold += one_line(r.gold_sql) + "\t" + r.db_id + "\n";
  }
  util::write_file(dir / "pred.txt", pred);
  util::write_file(dir / "gold.txt", gold);
}

} // namespace astres::eval
