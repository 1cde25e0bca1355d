#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace astres::sql {

enum class NodeKind {
  Select,
  From,
  Join,
  On,
  Where,
  GroupBy,
  Having,
  OrderBy,
  Limit,
  SetOp,
  Function,
  TableRef,
  ColumnRef,
  Alias,
  Literal,
  Operator,
  Star,
  Subquery,
};

std::string_view to_string(NodeKind kind) noexcept;

/// One node of a SQL syntax tree.
///
/// Leaves carry their token text (identifier, literal). A few inner kinds
/// carry text too: the name of a Function, the symbol of an Operator, the
/// flavour of a SetOp or Join, and "distinct" on a Select. All other inner
/// nodes have empty text.
struct AstNode {
  NodeKind kind = NodeKind::Literal;
  std::string text;
  std::vector<AstNode> children;

  AstNode() = default;
  AstNode(NodeKind k, std::string t, std::vector<AstNode> c = {})
      : kind(k), text(std::move(t)), children(std::move(c)) {}

  bool is_leaf() const noexcept { return children.empty(); }

  friend bool operator==(const AstNode &, const AstNode &) = default;
};

enum class Dialect { GenericSqlite };

struct SqlAst {
  AstNode root;
  Dialect dialect = Dialect::GenericSqlite;

  friend bool operator==(const SqlAst &, const SqlAst &) = default;
};

enum class NormMode { CrossDomain, InDomain };

std::string_view to_string(NormMode mode) noexcept;

struct NormalizedAst {
  AstNode root;
  NormMode mode = NormMode::CrossDomain;

  friend bool operator==(const NormalizedAst &, const NormalizedAst &) = default;
};

/// Number of nodes in the subtree rooted at `node`.
std::size_t subtree_size(const AstNode &node) noexcept;

/// Pre-order traversal; `visit` returns false to skip a node's children.
void walk(const AstNode &node, const std::function<bool(const AstNode &)> &visit);
void walk_mut(AstNode &node, const std::function<bool(AstNode &)> &visit);

/// Whether `node` starts a query scope (a Select or a SetOp).
inline bool is_query(const AstNode &node) noexcept {
  return node.kind == NodeKind::Select || node.kind == NodeKind::SetOp;
}

/// Clause kinds that may appear as direct children of a Select after the
/// projection list.
bool is_clause(NodeKind kind) noexcept;

/// Indented multi-line dump used in test diagnostics.
std::string debug_string(const AstNode &node);

} // namespace astres::sql
