#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "astres/error.hpp"
#include "astres/examples/embedder.hpp"
#include "astres/examples/store.hpp"
#include "astres/util/io.hpp"

using namespace astres;
using namespace astres::examples;

namespace {

class TableEmbedder : public Embedder {
public:
  explicit TableEmbedder(std::map<std::string, std::vector<float>> v) : v_(std::move(v)) {}
  std::string id() const override { return "table"; }
  std::vector<float> embed(const EmbedRequest &req) const override {
    auto it = v_.find(req.key);
    if (it == v_.end())
      throw EmbedderUnavailable("no vector for " + req.key);
    return it->second;
  }

private:
  std::map<std::string, std::vector<float>> v_;
};

std::filesystem::path scratch(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("astres_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

double norm(const std::vector<float> &v) {
  double s = 0;
  for (float f : v)
    s += double(f) * f;
  return std::sqrt(s);
}

const char *kSql1 = "SELECT T2.name, T2.capacity FROM concert AS T1 JOIN stadium AS T2 ON T1.stadium_id = "
                    "T2.stadium_id WHERE T1.year >= 2014";
const char *kSql2 = "SELECT name FROM highschooler WHERE grade = 10";

// q = (0.8, 0.6, 0); dot products: r0 0.8, r1 0.96, r2 0.6, r3 0.
TableEmbedder four() {
  return TableEmbedder({{"r0", {1, 0, 0}},
                        {"r1", {0.6f, 0.8f, 0}},
                        {"r2", {0, 1, 0}},
                        {"r3", {0, 0, 1}},
                        {"q", {0.8f, 0.6f, 0}}});
}

std::vector<ExamplePair> four_pairs() {
  return {{"r0", "zero", "SELECT a FROM t", "db0"},
          {"r1", "one", "SELECT a FROM t WHERE b = 1", "db1"},
          {"r2", "two", "SELECT count(*) FROM t GROUP BY a", "db0"},
          {"r3", "three", "SELECT a FROM t ORDER BY b LIMIT 1", "db1"}};
}

} // namespace

TEST(Embedder, HashingIsUnitNormAndDeterministic) {
  HashingEmbedder h(64);
  auto a = h.embed({"k", "How many singers do we have?"});
  EXPECT_EQ(a.size(), 64u);
  EXPECT_NEAR(norm(a), 1.0, 1e-6);
  EXPECT_EQ(a, h.embed({"other", "How many singers do we have?"}));
  EXPECT_EQ(h.id(), "hashing-64");
}

TEST(Embedder, ZeroVectorUnavailable) {
  std::vector<float> z(4, 0.0f);
  EXPECT_THROW(l2_normalize(z), EmbedderUnavailable);
  std::vector<float> v{3, 4};
  l2_normalize(v);
  EXPECT_FLOAT_EQ(v[0], 0.6f);
  EXPECT_FLOAT_EQ(v[1], 0.8f);
}

TEST(Embedder, PrecomputedLookup) {
  auto dir = scratch("pre");
  {
    std::ofstream out(dir / "v.jsonl");
    out << R"({"id": "a", "embedding": [3, 4]})" << "\n" << R"({"id": "b", "embedding": [0, 2]})" << "\n";
  }
  PrecomputedEmbedder p(dir / "v.jsonl", "mpnet");
  EXPECT_EQ(p.size(), 2u);
  auto a = p.embed({"a", "ignored"});
  EXPECT_NEAR(norm(a), 1.0, 1e-6);
  EXPECT_THROW(p.embed({"c", "x"}), EmbedderUnavailable);
}

TEST(Store, BuildGivesUnitNormRecords) {
  HashingEmbedder h(32);
  auto index = build_index({{"p0", "How many singers?", "SELECT count(*) FROM singer", ""},
                            {"p1", "List stadium names.", "SELECT name FROM stadium", ""}},
                           h);
  ASSERT_EQ(index.size(), 2u);
  EXPECT_EQ(index.dim(), 32u);
  EXPECT_EQ(index.embedder_id(), "hashing-32");
  for (const auto &r : index.records()) {
    EXPECT_NEAR(norm(r.embedding), 1.0, 1e-6);
    EXPECT_EQ(r.normalized_ast.mode, sql::NormMode::CrossDomain);
  }
}

TEST(Store, ParseErrorNamesPair) {
  HashingEmbedder h(32);
  try {
    build_index({{"good", "q", "SELECT a FROM t", ""}, {"broken_7", "q", "SELECT FROM WHERE", ""}}, h, 2);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("broken_7"), std::string::npos) << e.what();
  }
}

TEST(Store, SaveLoadByteIdentical) {
  auto emb = four();
  auto index = build_index(four_pairs(), emb, 3);
  auto a = scratch("save_a"), b = scratch("save_b");
  index.save(a);
  auto loaded = ExampleIndex::load(a);
  loaded.save(b);
  for (const char *f : {"records.jsonl", "embeddings.bin"})
    EXPECT_EQ(util::read_file(a / f), util::read_file(b / f)) << f;
  ASSERT_EQ(loaded.size(), index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    EXPECT_EQ(loaded.records()[i].embedding, index.records()[i].embedding);
    EXPECT_EQ(loaded.records()[i].normalized_ast, index.records()[i].normalized_ast);
    EXPECT_EQ(loaded.records()[i].db_id, index.records()[i].db_id);
  }
}

TEST(Retrieve, DotProductOrder) {
  auto emb = four();
  auto index = build_index(four_pairs(), emb);
  auto ranked = retrieve_by_question(index, emb, {"q", "?"});
  std::vector<std::string> ids;
  for (const auto &r : ranked)
    ids.push_back(index.records()[r.record].id);
  EXPECT_EQ(ids, (std::vector<std::string>{"r1", "r0", "r2", "r3"}));
  EXPECT_NEAR(ranked[0].cosine, 0.96, 1e-6);
  EXPECT_EQ(ranked[3].rank, 3u);

  EXPECT_EQ(retrieve_by_question(index, emb, {"q", "?"}, {2, std::nullopt}).size(), 2u);
  EXPECT_EQ(retrieve_by_question(index, emb, {"q", "?"}, {500, std::nullopt}).size(), 4u);
  auto other = retrieve_by_question(index, emb, {"q", "?"}, {500, std::string("db0")});
  ASSERT_EQ(other.size(), 2u);
  EXPECT_EQ(index.records()[other[0].record].id, "r1");
}

TEST(Retrieve, SelfSimilarityFirstAndTiesById) {
  TableEmbedder emb({{"b", {1, 0}}, {"a", {1, 0}}, {"c", {0, 1}}, {"q", {0, 1}}});
  auto index = build_index({{"b", "x", "SELECT a FROM t", ""}, {"a", "y", "SELECT a FROM t", ""},
                            {"c", "z", "SELECT a FROM t", ""}},
                           emb);
  auto ranked = retrieve_by_question(index, emb, {"q", "?"});
  EXPECT_EQ(index.records()[ranked[0].record].id, "c");
  EXPECT_EQ(index.records()[ranked[1].record].id, "a");
  EXPECT_EQ(index.records()[ranked[2].record].id, "b");
}

TEST(Select, IdenticalStructureChosenLast) {
  auto emb = four();
  auto index = build_index(four_pairs(), emb);
  auto r = select_examples(index, emb, {"q", "?"}, std::string("SELECT x FROM y GROUP BY z ORDER BY w"), 2);
  auto exact = select_examples(index, emb, {"q", "?"}, std::string("SELECT count(*) FROM u GROUP BY v"), 2);
  ASSERT_EQ(exact.chosen.size(), 2u);
  EXPECT_EQ(exact.chosen.back().id, "r2");
  EXPECT_DOUBLE_EQ(exact.chosen.back().ast_score, 1.0);
  EXPECT_LE(exact.chosen.front().ast_score, exact.chosen.back().ast_score);
  EXPECT_FALSE(exact.fallback);
  EXPECT_EQ(exact.pool_size, 4u);
  EXPECT_EQ(r.chosen.size(), 2u);
}

TEST(Select, SkeletonTwinsSeparated) {
  TableEmbedder emb({{"sql1", {1, 0}}, {"sql2", {1, 0}}, {"q", {1, 0}}});
  // Same question vector for both, and sql2 sorts after sql1 by id, so only
  // the AST score can put sql1 ahead.
  auto index = build_index({{"sql2", "a", kSql2, ""}, {"sql1", "b", kSql1, ""}}, emb);
  auto r = select_examples(index, emb, {"q", "?"}, std::string(kSql1), 1);
  ASSERT_EQ(r.chosen.size(), 1u);
  EXPECT_EQ(r.chosen[0].id, "sql1");
  auto both = select_examples(index, emb, {"q", "?"}, std::string(kSql1), 2);
  EXPECT_EQ(both.chosen.back().id, "sql1");
  EXPECT_GT(both.chosen.back().ast_score, both.chosen.front().ast_score);
}

TEST(Select, FallbackUsesQuestionRank) {
  auto emb = four();
  auto index = build_index(four_pairs(), emb);
  for (const std::optional<std::string> &approx : {std::optional<std::string>("not sql at all"),
                                                   std::optional<std::string>()}) {
    auto r = select_examples(index, emb, {"q", "?"}, approx, 3);
    EXPECT_TRUE(r.fallback);
    ASSERT_EQ(r.chosen.size(), 3u);
    EXPECT_EQ(r.chosen[0].id, "r2");
    EXPECT_EQ(r.chosen[1].id, "r0");
    EXPECT_EQ(r.chosen[2].id, "r1");
  }
}

TEST(Select, ContainedInPoolAndDeterministic) {
  auto emb = four();
  auto index = build_index(four_pairs(), emb);
  RetrieveOptions opts{2, std::nullopt};
  auto r = select_examples(index, emb, {"q", "?"}, std::string("SELECT count(*) FROM u GROUP BY v"), 5, opts);
  ASSERT_EQ(r.chosen.size(), 2u);
  for (const auto &c : r.chosen)
    EXPECT_TRUE(c.id == "r1" || c.id == "r0") << c.id;
  auto again = select_examples(index, emb, {"q", "?"}, std::string("SELECT count(*) FROM u GROUP BY v"), 5, opts);
  for (std::size_t i = 0; i < r.chosen.size(); ++i)
    EXPECT_EQ(r.chosen[i].id, again.chosen[i].id);
}
