#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "astres/sql/ast.hpp"

namespace oracle {

struct OpCounts {
  std::size_t alignments = 0;
  std::size_t total = 0;
  double ratio() const { return total == 0 ? 1.0 : static_cast<double>(alignments) / static_cast<double>(total); }
};

/// Exhaustive search over one-to-one, kind-preserving node matchings.
/// A leaf pair is admissible when the bigram Dice of its texts is at least
/// 0.6; an inner pair when at least 0.6 of the smaller side's leaves are
/// matched into the other's subtree, except the two roots which are always
/// admissible when their kinds agree. Each matched pair costs one update if
/// the texts differ, one move if its parents are not paired, and is one
/// alignment otherwise; unpaired nodes cost one insert or delete. Returns
/// the best alignment ratio over all admissible matchings.
OpCounts best_matching(const astres::sql::AstNode &source, const astres::sql::AstNode &target,
                       std::size_t *explored = nullptr);

/// Multiset bigram Dice; strings shorter than two bytes compare by equality.
double dice(const std::string &a, const std::string &b);

/// Random Spider-like query over a fixed toy schema. The same structure is
/// emitted with two alias spellings.
struct GeneratedQuery {
  std::string sql;
  std::string renamed; // same query, different table/projection aliases
};

GeneratedQuery random_query(std::mt19937_64 &rng, int depth = 0);

/// Uppercases everything outside quoted strings.
std::string upper_outside_quotes(const std::string &sql);

/// Node count of a parsed tree.
std::size_t size(const astres::sql::AstNode &n);

} // namespace oracle
