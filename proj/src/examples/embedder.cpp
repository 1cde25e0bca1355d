#include "astres/examples/embedder.hpp"

#include <cmath>
#include <fstream>

#include "astres/error.hpp"
#include "astres/text/tokenize.hpp"

namespace astres::examples {

void l2_normalize(std::vector<float> &v) {
  double norm = 0.0;
  for (float x : v)
    norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0)
    throw EmbedderUnavailable("zero embedding vector");
  for (float &x : v)
    x = static_cast<float>(x / norm);
}

PrecomputedEmbedder::PrecomputedEmbedder(const std::filesystem::path &jsonl, std::string embedder_id)
    : id_(std::move(embedder_id)) {
  std::ifstream in(jsonl);
  if (!in)
    throw EmbedderUnavailable("cannot open embeddings file " + jsonl.string());
  std::string line;
  std::size_t lineno = 0, dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      auto j = nlohmann::json::parse(line);
      auto v = j.at("embedding").get<std::vector<float>>();
      if (dim == 0)
        dim = v.size();
      if (v.size() != dim || dim == 0)
        throw EmbedderUnavailable(jsonl.string() + ":" + std::to_string(lineno) + ": dimension mismatch");
      l2_normalize(v);
      vectors_[j.at("id").get<std::string>()] = std::move(v);
    } catch (const nlohmann::json::exception &e) {
      throw EmbedderUnavailable(jsonl.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::vector<float> PrecomputedEmbedder::embed(const EmbedRequest &req) const {
  auto it = vectors_.find(req.key);
  if (it == vectors_.end())
    throw EmbedderUnavailable("no precomputed embedding for '" + req.key + "'");
  return it->second;
}

RemoteEmbedder::RemoteEmbedder(std::string url, std::string model, util::HttpOptions opts)
    : url_(std::move(url)), model_(std::move(model)), opts_(std::move(opts)) {}

std::vector<float> RemoteEmbedder::embed(const EmbedRequest &req) const {
  nlohmann::json body = {{"model", model_}, {"input", nlohmann::json::array({req.text})}};
  nlohmann::json reply;
  try {
    reply = util::post_json(url_, body, opts_);
  } catch (const EndpointError &e) {
    throw EmbedderUnavailable(e.what());
  }
  try {
    auto v = reply.at("data").at(0).at("embedding").get<std::vector<float>>();
    l2_normalize(v);
    return v;
  } catch (const nlohmann::json::exception &e) {
    throw EmbedderUnavailable("unexpected embedding reply: " + std::string(e.what()));
  }
}

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0)
    throw EmbedderUnavailable("hashing embedder needs a positive dimension");
}

std::vector<float> HashingEmbedder::embed(const EmbedRequest &req) const {
  std::vector<float> v(dim_, 0.0f);
  auto toks = text::tokenize(req.text);
  auto add = [&](const std::string &feature) {
    std::uint64_t h = fnv1a(feature);
    v[h % dim_] += (h >> 63) ? -1.0f : 1.0f;
  };
  for (std::size_t i = 0; i < toks.size(); ++i) {
    add(toks[i]);
    if (i + 1 < toks.size())
      add(toks[i] + " " + toks[i + 1]);
  }
  bool any = false;
  for (float x : v)
    any |= x != 0.0f;
  if (!any)
    v[fnv1a(req.text) % dim_] = 1.0f;
  l2_normalize(v);
  return v;
}

} // namespace astres::examples
