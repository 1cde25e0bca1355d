#include "astres/eval/config.hpp"

#include <set>

#include "astres/error.hpp"
#include "astres/util/io.hpp"

namespace astres::eval {

using nlohmann::json;

namespace {

void check_keys(const json &j, const std::string &where, std::initializer_list<const char *> allowed) {
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &[k, v] : j.items())
    if (!ok.count(k))
      throw ConfigError("unknown config key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <typename T> void get(const json &j, const char *key, const std::string &where, T &out) {
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) +
                      "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
  if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute())
    return p;
  return base / p;
}

} // namespace

RunConfig config_from_json(const json &j, const std::filesystem::path &base) {
  check_keys(j, "",
             {"dataset", "samples", "index", "output", "workers", "strict", "cross_lingual",
              "max_failure_fraction", "embedder", "approximator", "selection", "bm25", "values",
              "examples", "split", "llm"});
  RunConfig c;
  std::string s;
  get(j, "dataset", "", s);
  if (s.empty())
    throw ConfigError("config key 'dataset' is required");
  c.dataset = resolve(base, s);
  get(j, "samples", "", c.samples);
  if (j.contains("index")) {
    s.clear();
    get(j, "index", "", s);
    c.index = resolve(base, s);
  }
  s = c.output.string();
  get(j, "output", "", s);
  c.output = resolve(base, s);
  get(j, "workers", "", c.workers);
  get(j, "strict", "", c.strict);
  get(j, "cross_lingual", "", c.cross_lingual);
  get(j, "max_failure_fraction", "", c.max_failure_fraction);

  if (j.contains("embedder")) {
    const auto &e = j["embedder"];
    check_keys(e, "embedder", {"backend", "path", "url", "model", "dim"});
    get(e, "backend", "embedder", c.embedder.backend);
    get(e, "path", "embedder", c.embedder.path);
    get(e, "url", "embedder", c.embedder.url);
    get(e, "model", "embedder", c.embedder.model);
    get(e, "dim", "embedder", c.embedder.dim);
    c.embedder.path = resolve(base, c.embedder.path).string();
  }
  if (j.contains("approximator")) {
    const auto &a = j["approximator"];
    check_keys(a, "approximator", {"mode", "path", "url", "label_url", "construct_url", "separator"});
    get(a, "mode", "approximator", c.approximator.mode);
    get(a, "path", "approximator", c.approximator.path);
    get(a, "url", "approximator", c.approximator.url);
    get(a, "label_url", "approximator", c.approximator.label_url);
    get(a, "construct_url", "approximator", c.approximator.construct_url);
    if (a.contains("separator")) {
      std::string sep;
      get(a, "separator", "approximator", sep);
      c.approximator.separator = sep;
    }
    c.approximator.path = resolve(base, c.approximator.path).string();
  }
  if (j.contains("selection")) {
    const auto &sel = j["selection"];
    check_keys(sel, "selection", {"mode", "k"});
    std::string mode(schema::to_string(c.selection.mode));
    get(sel, "mode", "selection", mode);
    try {
      c.selection.mode = schema::selection_mode_from_string(mode);
    } catch (const std::exception &e) {
      throw ConfigError(std::string("selection.mode: ") + e.what());
    }
    get(sel, "k", "selection", c.selection.k);
  }
  if (j.contains("bm25")) {
    check_keys(j["bm25"], "bm25", {"k1", "b"});
    get(j["bm25"], "k1", "bm25", c.bm25.k1);
    get(j["bm25"], "b", "bm25", c.bm25.b);
  }
  if (j.contains("values")) {
    check_keys(j["values"], "values", {"topk"});
    get(j["values"], "topk", "values", c.values_topk);
  }
  if (j.contains("examples")) {
    const auto &e = j["examples"];
    check_keys(e, "examples", {"e", "pool", "exclude_same_db"});
    get(e, "e", "examples", c.examples.e);
    get(e, "pool", "examples", c.examples.pool);
    get(e, "exclude_same_db", "examples", c.examples.exclude_same_db);
  }
  if (j.contains("split")) {
    check_keys(j["split"], "split", {"r"});
    get(j["split"], "r", "split", c.split_r);
    if (c.split_r < 1)
      throw InvalidR("split.r must be at least 1");
  }
  if (j.contains("llm")) {
    const auto &l = j["llm"];
    check_keys(l, "llm", {"backend", "url", "model", "max_tokens", "cache", "max_in_flight", "token_env"});
    get(l, "backend", "llm", c.llm.backend);
    get(l, "url", "llm", c.llm.url);
    get(l, "model", "llm", c.llm.model);
    get(l, "max_tokens", "llm", c.llm.max_tokens);
    get(l, "cache", "llm", c.llm.cache);
    get(l, "max_in_flight", "llm", c.llm.max_in_flight);
    get(l, "token_env", "llm", c.llm.token_env);
    c.llm.cache = resolve(base, c.llm.cache).string();
  }

  static const std::set<std::string> approx_modes = {"oracle", "file", "remote", "split-labeler", "none"};
  if (!approx_modes.count(c.approximator.mode))
    throw ConfigError("unknown approximator.mode '" + c.approximator.mode + "'");
  static const std::set<std::string> llm_backends = {"none", "replay", "remote-chat"};
  if (!llm_backends.count(c.llm.backend))
    throw ConfigError("unknown llm.backend '" + c.llm.backend + "'");
  static const std::set<std::string> embedders = {"hashing", "precomputed", "remote"};
  if (!embedders.count(c.embedder.backend))
    throw ConfigError("unknown embedder.backend '" + c.embedder.backend + "'");
  return c;
}

RunConfig load_config(const std::filesystem::path &file) {
  json j;
  try {
    j = json::parse(util::read_file(file));
  } catch (const json::exception &e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return config_from_json(j, file.parent_path());
}

json config_to_json(const RunConfig &c) {
  json j = {{"dataset", c.dataset.string()},
            {"samples", c.samples},
            {"output", c.output.string()},
            {"workers", c.workers},
            {"strict", c.strict},
            {"cross_lingual", c.cross_lingual},
            {"max_failure_fraction", c.max_failure_fraction},
            {"embedder",
             {{"backend", c.embedder.backend},
              {"path", c.embedder.path},
              {"url", c.embedder.url},
              {"model", c.embedder.model},
              {"dim", c.embedder.dim}}},
            {"approximator",
             {{"mode", c.approximator.mode},
              {"path", c.approximator.path},
              {"url", c.approximator.url},
              {"label_url", c.approximator.label_url},
              {"construct_url", c.approximator.construct_url}}},
            {"selection", {{"mode", schema::to_string(c.selection.mode)}, {"k", c.selection.k}}},
            {"bm25", {{"k1", c.bm25.k1}, {"b", c.bm25.b}}},
            {"values", {{"topk", c.values_topk}}},
            {"examples",
             {{"e", c.examples.e}, {"pool", c.examples.pool}, {"exclude_same_db", c.examples.exclude_same_db}}},
            {"split", {{"r", c.split_r}}},
            {"llm",
             {{"backend", c.llm.backend},
              {"url", c.llm.url},
              {"model", c.llm.model},
              {"max_tokens", c.llm.max_tokens},
              {"cache", c.llm.cache},
              {"max_in_flight", c.llm.max_in_flight},
              {"token_env", c.llm.token_env}}}};
  if (c.index)
    j["index"] = c.index->string();
  if (c.approximator.separator)
    j["approximator"]["separator"] = *c.approximator.separator;
  return j;
}

} // namespace astres::eval
