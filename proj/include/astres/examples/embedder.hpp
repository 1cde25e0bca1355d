#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "astres/util/http.hpp"

namespace astres::examples {

/// Text to embed plus a stable key (record or sample id) that
/// precomputed backends look vectors up by.
struct EmbedRequest {
  std::string key;
  std::string text;
};

class Embedder {
public:
  virtual ~Embedder() = default;
  virtual std::string id() const = 0;
  /// Unit-norm vector. Throws EmbedderUnavailable.
  virtual std::vector<float> embed(const EmbedRequest &req) const = 0;
};

/// Vectors read from JSON-lines {"id": ..., "embedding": [...]}.
class PrecomputedEmbedder : public Embedder {
public:
  PrecomputedEmbedder(const std::filesystem::path &jsonl, std::string embedder_id);
  std::string id() const override { return id_; }
  std::vector<float> embed(const EmbedRequest &req) const override;
  std::size_t size() const noexcept { return vectors_.size(); }

private:
  std::string id_;
  std::unordered_map<std::string, std::vector<float>> vectors_;
};

/// OpenAI-style embeddings endpoint: {model, input: [text]} ->
/// {data: [{embedding: [...]}]}.
class RemoteEmbedder : public Embedder {
public:
  RemoteEmbedder(std::string url, std::string model, util::HttpOptions opts);
  std::string id() const override { return "remote:" + model_; }
  std::vector<float> embed(const EmbedRequest &req) const override;

private:
  std::string url_;
  std::string model_;
  util::HttpOptions opts_;
};

/// Offline bag-of-features embedder: stemmed unigrams and bigrams hashed
/// into `dim` buckets with signed counts. Deterministic, no model needed.
class HashingEmbedder : public Embedder {
public:
  explicit HashingEmbedder(std::size_t dim = 256);
  std::string id() const override { return "hashing-" + std::to_string(dim_); }
  std::vector<float> embed(const EmbedRequest &req) const override;

private:
  std::size_t dim_;
};

/// Scales `v` to unit L2 norm. Throws EmbedderUnavailable on a zero vector.
void l2_normalize(std::vector<float> &v);

} // namespace astres::examples
