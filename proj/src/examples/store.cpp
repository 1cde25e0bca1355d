#include "astres/examples/store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "astres/error.hpp"
#include "astres/sql/normalize.hpp"
#include "astres/sql/parser.hpp"
#include "astres/util/io.hpp"
#include "astres/util/parallel.hpp"

namespace astres::examples {

namespace {

void attach_ast(ExampleRecord &r) {
  try {
    r.normalized_ast = sql::normalize(sql::parse_sql(r.sql), sql::NormMode::CrossDomain);
  } catch (const ParseError &e) {
    throw ParseError("example '" + r.id + "': " + e.what(), e.offset());
  } catch (const Error &e) {
    throw ParseError("example '" + r.id + "': " + e.what(), 0);
  }
  r.prepared = std::make_shared<const sql::PreparedTree>(r.normalized_ast);
}

double dot(const std::vector<float> &a, const std::vector<float> &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a[i]) * b[i];
  return s;
}

void put_f32(std::string &out, float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  for (int i = 0; i < 4; ++i)
    out += static_cast<char>((u >> (8 * i)) & 0xFF);
}

float get_f32(const unsigned char *p) {
  std::uint32_t u = 0;
  for (int i = 0; i < 4; ++i)
    u |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

std::vector<RankedRecord> rank(const ExampleIndex &index, const std::vector<float> &q,
                               const RetrieveOptions &opts) {
  if (q.size() != index.dim())
    throw EmbedderUnavailable("question embedding has dimension " + std::to_string(q.size()) +
                              ", index has " + std::to_string(index.dim()));
  const auto &recs = index.records();
  std::vector<RankedRecord> out;
  out.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (opts.exclude_db && recs[i].db_id == *opts.exclude_db)
      continue;
    out.push_back({i, dot(q, recs[i].embedding), 0});
  }
  std::sort(out.begin(), out.end(), [&](const RankedRecord &a, const RankedRecord &b) {
    if (a.cosine != b.cosine)
      return a.cosine > b.cosine;
    return recs[a.record].id < recs[b.record].id;
  });
  if (out.size() > opts.pool)
    out.resize(opts.pool);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i].rank = i;
  return out;
}

} // namespace

ExampleIndex::ExampleIndex(std::string embedder_id, std::vector<ExampleRecord> records)
    : embedder_id_(std::move(embedder_id)), records_(std::move(records)) {
  if (!records_.empty())
    dim_ = records_.front().embedding.size();
  for (const auto &r : records_)
    if (r.embedding.size() != dim_)
      throw EmbedderUnavailable("record '" + r.id + "' has a different embedding dimension");
}

void ExampleIndex::save(const std::filesystem::path &dir) const {
  std::string recs;
  for (const auto &r : records_) {
    nlohmann::json j = {{"id", r.id}, {"question", r.question}, {"sql", r.sql}};
    if (!r.db_id.empty())
      j["db_id"] = r.db_id;
    recs += j.dump() + "\n";
  }
  util::write_file(dir / "records.jsonl", recs);

  nlohmann::json header = {{"count", records_.size()}, {"dim", dim_}, {"embedder_id", embedder_id_}};
  std::string bin = header.dump() + "\n";
  bin.reserve(bin.size() + records_.size() * dim_ * 4);
  for (const auto &r : records_)
    for (float f : r.embedding)
      put_f32(bin, f);
  util::write_file(dir / "embeddings.bin", bin);
}

ExampleIndex ExampleIndex::load(const std::filesystem::path &dir) {
  std::vector<ExampleRecord> records;
  {
    std::istringstream in(util::read_file(dir / "records.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty())
        continue;
      auto j = nlohmann::json::parse(line);
      ExampleRecord r;
      r.id = j.at("id").get<std::string>();
      r.question = j.at("question").get<std::string>();
      r.sql = j.at("sql").get<std::string>();
      r.db_id = j.value("db_id", "");
      records.push_back(std::move(r));
    }
  }
  std::string bin = util::read_file(dir / "embeddings.bin");
  auto nl = bin.find('\n');
  if (nl == std::string::npos)
    throw IoError((dir / "embeddings.bin").string() + ": missing header");
  auto header = nlohmann::json::parse(bin.substr(0, nl));
  auto count = header.at("count").get<std::size_t>();
  auto dim = header.at("dim").get<std::size_t>();
  if (count != records.size())
    throw IoError("embeddings.bin holds " + std::to_string(count) + " vectors for " +
                  std::to_string(records.size()) + " records");
  if (bin.size() - nl - 1 != count * dim * 4)
    throw IoError("embeddings.bin has the wrong payload size");
  const auto *p = reinterpret_cast<const unsigned char *>(bin.data() + nl + 1);
  for (auto &r : records) {
    r.embedding.resize(dim);
    for (std::size_t k = 0; k < dim; ++k, p += 4)
      r.embedding[k] = get_f32(p);
    attach_ast(r);
  }
  return ExampleIndex(header.at("embedder_id").get<std::string>(), std::move(records));
}

ExampleIndex build_index(const std::vector<ExamplePair> &pairs, const Embedder &embedder,
                         std::size_t workers) {
  std::vector<ExampleRecord> records(pairs.size());
  util::parallel_for(pairs.size(), workers, [&](std::size_t i) {
    ExampleRecord &r = records[i];
    r.id = pairs[i].id;
    r.question = pairs[i].question;
    r.sql = pairs[i].sql;
    r.db_id = pairs[i].db_id;
    attach_ast(r);
    r.embedding = embedder.embed({r.id, r.question});
  });
  return ExampleIndex(embedder.id(), std::move(records));
}

std::vector<RankedRecord> retrieve_by_question(const ExampleIndex &index, const Embedder &embedder,
                                               const EmbedRequest &question,
                                               const RetrieveOptions &opts) {
  return rank(index, embedder.embed(question), opts);
}

SelectionResult select_examples(const ExampleIndex &index, const std::vector<float> &question_vec,
                                const std::optional<std::string> &approx_sql, std::size_t e,
                                const RetrieveOptions &opts) {
  auto pool = rank(index, question_vec, opts);
  const auto &recs = index.records();
  SelectionResult out;
  out.pool_size = pool.size();

  std::optional<sql::PreparedTree> approx;
  if (approx_sql) {
    try {
      approx.emplace(sql::normalize(sql::parse_sql(*approx_sql), sql::NormMode::CrossDomain));
    } catch (const Error &) {
      approx.reset();
    }
  }

  struct Scored {
    double score;
    const RankedRecord *r;
  };
  std::vector<Scored> scored;
  scored.reserve(pool.size());
  for (const auto &r : pool)
    scored.push_back({approx ? sql::similarity(*approx, *recs[r.record].prepared).score : 0.0, &r});
  out.fallback = !approx;

  auto better = [&](const Scored &a, const Scored &b) {
    if (a.score != b.score)
      return a.score > b.score;
    if (a.r->rank != b.r->rank)
      return a.r->rank < b.r->rank;
    return recs[a.r->record].id < recs[b.r->record].id;
  };
  std::size_t keep = std::min(e, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  for (std::size_t i = keep; i-- > 0;) {
    const auto &rec = recs[scored[i].r->record];
    out.chosen.push_back({rec.id, rec.question, rec.sql, scored[i].score, scored[i].r->rank});
  }
  return out;
}

SelectionResult select_examples(const ExampleIndex &index, const Embedder &embedder,
                                const EmbedRequest &question,
                                const std::optional<std::string> &approx_sql, std::size_t e,
                                const RetrieveOptions &opts) {
  return select_examples(index, embedder.embed(question), approx_sql, e, opts);
}

} // namespace astres::examples
