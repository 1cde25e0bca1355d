#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "astres/error.hpp"
#include "astres/sql/diff.hpp"
#include "astres/sql/normalize.hpp"
#include "astres/sql/parser.hpp"
#include "astres/sql/render.hpp"
#include "astres/util/io.hpp"
#include "oracle.hpp"

using namespace astres;
using namespace astres::sql;

namespace {

NormalizedAst norm(const std::string &sql, NormMode mode = NormMode::CrossDomain) {
  return normalize(parse_sql(sql), mode);
}

std::string rendered(const std::string &sql, NormMode mode) { return render(norm(sql, mode)); }

const char *kSql1 = "SELECT T2.name, T2.capacity FROM concert AS T1 JOIN stadium AS T2 ON T1.stadium_id = "
                    "T2.stadium_id WHERE T1.year >= 2014";
const char *kSql2 = "SELECT name FROM highschooler WHERE grade = 10";

} // namespace

TEST(Parser, SimpleSelectTree) {
  auto ast = parse_sql(kSql2);
  const auto &root = ast.root;
  ASSERT_EQ(root.kind, NodeKind::Select);
  ASSERT_EQ(root.children.size(), 3u);
  EXPECT_EQ(root.children[0], AstNode(NodeKind::ColumnRef, "name"));
  EXPECT_EQ(root.children[1], AstNode(NodeKind::From, "", {AstNode(NodeKind::TableRef, "highschooler")}));
  const auto &where = root.children[2];
  ASSERT_EQ(where.kind, NodeKind::Where);
  ASSERT_EQ(where.children.size(), 1u);
  EXPECT_EQ(where.children[0].kind, NodeKind::Operator);
  EXPECT_EQ(where.children[0].text, "=");
  EXPECT_EQ(where.children[0].children.at(1), AstNode(NodeKind::Literal, "10"));
}

TEST(Parser, CanonicalRender) {
  EXPECT_EQ(render(parse_sql("select count(*) from t1 as a join t2 on a.id = t2.id where a.x like '%a%' "
                             "order by a.y desc limit 3")),
            "SELECT COUNT(*) FROM t1 AS a JOIN t2 ON a.id = t2.id WHERE a.x LIKE '%a%' ORDER BY a.y DESC LIMIT 3");
  EXPECT_EQ(render(parse_sql("SELECT a FROM t LIMIT 5, 10")), "SELECT a FROM t LIMIT 10 OFFSET 5");
  EXPECT_EQ(render(parse_sql("SELECT a FROM t WHERE b = -3;")), "SELECT a FROM t WHERE b = -3");
  EXPECT_EQ(render(parse_sql("SELECT 'it''s' FROM t")), "SELECT 'it''s' FROM t");
  EXPECT_EQ(render(parse_sql("SELECT `order` FROM t")), "SELECT `order` FROM t");
}

TEST(Parser, RenderRoundTripsOnSpiderDev) {
  auto dev = util::read_json(std::string(ASTRES_SPIDER_DEV) + "/dev.json");
  std::size_t n = 0;
  for (const auto &s : dev) {
    auto ast = parse_sql(s.at("query").get<std::string>());
    auto again = parse_sql(render(ast));
    ASSERT_EQ(ast, again) << s.at("query");
    ++n;
  }
  EXPECT_EQ(n, 1034u);
}

TEST(Parser, MalformedInputReportsOffset) {
  try {
    parse_sql("SELECT FROM WHERE");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.offset(), 7u);
  }
  try {
    parse_sql("SELECT a FROM");
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.offset(), 13u);
  }
  EXPECT_THROW(parse_sql(""), ParseError);
  EXPECT_THROW(parse_sql("SELECT a FROM t WHERE"), ParseError);
  EXPECT_THROW(parse_sql("SELECT a FROM t; SELECT b FROM u"), ParseError);
}

TEST(Parser, UnsupportedConstructs) {
  EXPECT_THROW(parse_sql("INSERT INTO t VALUES (1)"), UnsupportedConstruct);
  EXPECT_THROW(parse_sql("SELECT CASE WHEN a THEN b END FROM t"), UnsupportedConstruct);
  EXPECT_THROW(parse_sql("SELECT a FROM t RIGHT JOIN u ON t.x = u.y"), UnsupportedConstruct);
}

TEST(Normalize, ProductsOrdersSteps) {
  const std::string sql = "SELECT T1.Category, COUNT(*) AS Num FROM Products AS T1 JOIN Orders AS T2 ON T1.id = "
                          "T2.pid GROUP BY T1.Category ORDER BY Num ASC";
  // Join sources are sorted by name; ON operands are ordered with the join
  // sources, so the qualifiers stay attached to their own columns.
  EXPECT_EQ(rendered(sql, NormMode::InDomain),
            "SELECT products.category, COUNT(*) FROM orders JOIN products ON orders.pid = products.id "
            "GROUP BY products.category ORDER BY COUNT(*) ASC");
  EXPECT_EQ(rendered(sql, NormMode::CrossDomain),
            "SELECT _, COUNT(*) FROM _ JOIN _ ON _ = _ GROUP BY _ ORDER BY COUNT(*) ASC");
}

TEST(Normalize, SingleTableQualifiersDropped) {
  EXPECT_EQ(rendered("SELECT T1.name FROM singer AS T1 WHERE T1.age BETWEEN 1 AND 3 GROUP BY T1.name HAVING "
                     "count(*) >= 2",
                     NormMode::InDomain),
            "SELECT name FROM singer WHERE age BETWEEN 1 AND 3 GROUP BY name HAVING COUNT(*) >= 2");
  EXPECT_EQ(rendered("SELECT a FROM (SELECT a FROM t) AS d WHERE d.a > 1", NormMode::InDomain),
            "SELECT a FROM (SELECT a FROM t) WHERE a > 1");
}

TEST(Normalize, UnknownQualifier) {
  EXPECT_THROW(norm("SELECT x.a FROM t"), UnresolvableAlias);
}

TEST(Normalize, IdempotentOnSpiderDev) {
  auto dev = util::read_json(std::string(ASTRES_SPIDER_DEV) + "/dev.json");
  for (const auto &s : dev)
    for (auto mode : {NormMode::CrossDomain, NormMode::InDomain}) {
      auto once = normalize(parse_sql(s.at("query").get<std::string>()), mode);
      ASSERT_EQ(normalize(once, mode), once) << s.at("query");
    }
}

TEST(Normalize, RenderedNormalFormReparses) {
  auto n = norm(kSql1, NormMode::InDomain);
  EXPECT_EQ(normalize(parse_sql(render(n)), NormMode::InDomain), n);
}

TEST(Normalize, AliasesDoNotMatterInDomain) {
  EXPECT_EQ(norm("SELECT T1.name FROM singer AS T1 JOIN concert AS T2 ON T1.singer_id = T2.singer_id",
                 NormMode::InDomain),
            norm("SELECT s.name FROM concert AS c JOIN singer AS s ON c.singer_id = s.singer_id", NormMode::InDomain));
}

TEST(Refs, CountUniqueColumns) {
  EXPECT_EQ(count_unique_columns(parse_sql(kSql1)), 5u);
  EXPECT_EQ(count_unique_columns(parse_sql("SELECT count(*) FROM t")), 0u);
  EXPECT_EQ(count_unique_columns(parse_sql("SELECT a, a, b FROM t WHERE a > 1")), 2u);
}

TEST(Diff, DiceMatchesOracle) {
  for (auto [a, b] : std::vector<std::pair<std::string, std::string>>{
           {"night", "nacht"}, {"aa", "aaa"}, {"_", "_"}, {"a", "b"}, {"singer_id", "stadium_id"}, {"", ""}})
    EXPECT_DOUBLE_EQ(dice(a, b), oracle::dice(a, b)) << a << " / " << b;
  EXPECT_DOUBLE_EQ(dice("night", "nacht"), 0.25);
}

TEST(Diff, AddedWhereClause) {
  auto s = similarity(norm("SELECT a FROM t"), norm("SELECT a FROM t WHERE b = 1"));
  EXPECT_EQ(s.n_alignments, 4u);
  EXPECT_EQ(s.n_total_ops, 8u);
  EXPECT_DOUBLE_EQ(s.score, 0.5);
}

TEST(Diff, CountWithGroupBy) {
  auto s = similarity(norm("SELECT a FROM t"), norm("SELECT count(*) FROM t GROUP BY a"));
  EXPECT_EQ(s.n_alignments, 3u);
  EXPECT_EQ(s.n_total_ops, 7u);
  EXPECT_DOUBLE_EQ(s.score, 3.0 / 7.0);
  auto script = diff(norm("SELECT a FROM t"), norm("SELECT count(*) FROM t GROUP BY a"));
  EXPECT_EQ(script.count(EditKind::Move), 1u);
  EXPECT_EQ(script.count(EditKind::Insert), 3u);
  EXPECT_EQ(script.count(EditKind::Delete), 0u);
}

TEST(Diff, SkeletonTwinsAreDistinguished) {
  auto s = similarity(norm(kSql1), norm(kSql2));
  EXPECT_LT(s.score, 1.0);
  // The target's WHERE column pairs with the ON column (same '=' parent), so
  // WHERE and its operator stay unmatched: root, first projection, FROM and
  // its table align; the column and literal move; 9 deletes, 2 inserts.
  EXPECT_EQ(s.n_alignments, 4u);
  EXPECT_EQ(s.n_total_ops, 17u);
}

TEST(Diff, GreedyCanFallBelowBestMatching) {
  auto a = norm(kSql1), b = norm(kSql2);
  EXPECT_LT(similarity(a, b).score, oracle::best_matching(a.root, b.root).ratio());
}

TEST(Diff, IdenticalTrees) {
  auto a = norm(kSql1);
  auto s = similarity(a, a);
  EXPECT_DOUBLE_EQ(s.score, 1.0);
  EXPECT_EQ(s.n_total_ops, oracle::size(a.root));
}

TEST(Diff, ModeMismatch) {
  EXPECT_THROW(similarity(norm(kSql2, NormMode::CrossDomain), norm(kSql2, NormMode::InDomain)), ModeMismatch);
}

TEST(Diff, ScriptCoversEveryNodeOnce) {
  auto a = norm(kSql1, NormMode::InDomain), b = norm(kSql2, NormMode::InDomain);
  auto script = diff(a, b);
  std::size_t src = 0, tgt = 0;
  for (const auto &op : script.ops) {
    src += op.source.has_value() && op.kind != EditKind::Move;
    tgt += op.target.has_value() && op.kind != EditKind::Move;
  }
  EXPECT_EQ(src, oracle::size(a.root));
  EXPECT_EQ(tgt, oracle::size(b.root));
  EXPECT_EQ(apply_script(a.root, script), b.root);
}

TEST(Diff, ApplyScriptRejectsIncompleteScript) {
  auto a = norm(kSql2), b = norm(kSql1);
  auto script = diff(a, b);
  auto truncated = script;
  truncated.ops.pop_back();
  EXPECT_THROW(apply_script(a.root, truncated), std::invalid_argument);
  auto doubled = script;
  doubled.ops.push_back(script.ops.front());
  EXPECT_THROW(apply_script(a.root, doubled), std::invalid_argument);
}

TEST(Diff, RandomPairsSoundAndBounded) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto q1 = oracle::random_query(rng), q2 = oracle::random_query(rng);
    for (auto mode : {NormMode::CrossDomain, NormMode::InDomain}) {
      auto a = norm(q1.sql, mode), b = norm(q2.sql, mode);
      auto script = diff(a, b);
      ASSERT_EQ(apply_script(a.root, script), b.root) << q1.sql << "\n" << q2.sql;
      auto s = similarity(a, b);
      ASSERT_GE(s.score, 0.0);
      ASSERT_LE(s.score, 1.0);
      ASSERT_EQ(s.n_alignments, script.count(EditKind::Alignment));
    }
  }
}

TEST(Diff, AgreesWithExhaustiveOracleOnTinyPairs) {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"SELECT a FROM t", "SELECT a FROM t WHERE b = 1"},
      {"SELECT a FROM t", "SELECT count(*) FROM t GROUP BY a"},
      {"SELECT a, b FROM t", "SELECT b FROM t ORDER BY a"},
      {"SELECT max(a) FROM t", "SELECT min(a) FROM t"},
      {"SELECT a FROM t WHERE b > 1", "SELECT a FROM t WHERE b > 1 AND c = 2"},
  };
  for (const auto &[x, y] : pairs)
    for (auto mode : {NormMode::CrossDomain, NormMode::InDomain}) {
      auto a = norm(x, mode), b = norm(y, mode);
      EXPECT_DOUBLE_EQ(similarity(a, b).score, oracle::best_matching(a.root, b.root).ratio()) << x << " / " << y;
    }
}

TEST(Diff, PreparedTreesGiveSameScript) {
  auto a = norm(kSql1), b = norm(kSql2);
  PreparedTree pa(a), pb(b);
  auto direct = similarity(a, b), prepared = similarity(pa, pb);
  EXPECT_EQ(direct.n_alignments, prepared.n_alignments);
  EXPECT_EQ(direct.n_total_ops, prepared.n_total_ops);
}
