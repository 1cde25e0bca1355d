#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "astres/schema/bm25.hpp"
#include "astres/schema/select.hpp"

namespace astres::eval {

/// One declarative run. Keys mirror the JSON file:
///   dataset, samples, index, output, workers, strict, cross_lingual,
///   max_failure_fraction,
///   embedder.{backend, path, url, model, dim},
///   approximator.{mode, path, url, label_url, construct_url, separator},
///   selection.{mode, k}, bm25.{k1, b}, values.topk,
///   examples.{e, pool, exclude_same_db}, split.r,
///   llm.{backend, url, model, max_tokens, cache, max_in_flight, token_env}
struct RunConfig {
  std::filesystem::path dataset;
  std::string samples = "dev.json";
  std::optional<std::filesystem::path> index; // no index: prompts carry no examples
  std::filesystem::path output = "run";
  std::size_t workers = 1;
  bool strict = true;
  bool cross_lingual = false; // full schema, no values
  double max_failure_fraction = 0.1;

  struct {
    std::string backend = "hashing"; // hashing | precomputed | remote
    std::string path;
    std::string url;
    std::string model;
    std::size_t dim = 256;
  } embedder;

  struct {
    std::string mode = "oracle"; // oracle | file | remote | split-labeler | none
    std::string path;
    std::string url;
    std::string label_url;
    std::string construct_url;
    std::optional<std::string> separator;
  } approximator;

  schema::SelectionConfig selection;
  schema::Bm25Params bm25;
  std::size_t values_topk = 3;

  struct {
    std::size_t e = 5;
    std::size_t pool = 500;
    bool exclude_same_db = true;
  } examples;

  std::size_t split_r = 64;

  struct {
    std::string backend = "none"; // none | replay | remote-chat
    std::string url;
    std::string model;
    std::size_t max_tokens = 256;
    std::string cache; // replay file; with remote-chat, misses are appended
    std::size_t max_in_flight = 4;
    std::string token_env = "OPENAI_API_KEY";
  } llm;
};

/// Unknown keys and wrong types throw ConfigError. Relative paths are
/// resolved against `base`.
RunConfig config_from_json(const nlohmann::json &j, const std::filesystem::path &base = {});
RunConfig load_config(const std::filesystem::path &file);
nlohmann::json config_to_json(const RunConfig &c);

} // namespace astres::eval
