#include "astres/sql/ast.hpp"

#include <sstream>

namespace astres::sql {

std::string_view to_string(NodeKind kind) noexcept {
  switch (kind) {
  case NodeKind::Select: return "select";
  case NodeKind::From: return "from";
  case NodeKind::Join: return "join";
  case NodeKind::On: return "on";
  case NodeKind::Where: return "where";
  case NodeKind::GroupBy: return "group-by";
  case NodeKind::Having: return "having";
  case NodeKind::OrderBy: return "order-by";
  case NodeKind::Limit: return "limit";
  case NodeKind::SetOp: return "set-op";
  case NodeKind::Function: return "function";
  case NodeKind::TableRef: return "identifier-table";
  case NodeKind::ColumnRef: return "identifier-column";
  case NodeKind::Alias: return "alias";
  case NodeKind::Literal: return "literal";
  case NodeKind::Operator: return "operator";
  case NodeKind::Star: return "star";
  case NodeKind::Subquery: return "subquery";
  }
  return "?";
}

std::string_view to_string(NormMode mode) noexcept {
  return mode == NormMode::CrossDomain ? "cross-domain" : "in-domain";
}

std::size_t subtree_size(const AstNode &node) noexcept {
  std::size_t n = 1;
  for (const auto &c : node.children)
    n += subtree_size(c);
  return n;
}

void walk(const AstNode &node, const std::function<bool(const AstNode &)> &visit) {
  if (!visit(node))
    return;
  for (const auto &c : node.children)
    walk(c, visit);
}

void walk_mut(AstNode &node, const std::function<bool(AstNode &)> &visit) {
  if (!visit(node))
    return;
  for (auto &c : node.children)
    walk_mut(c, visit);
}

bool is_clause(NodeKind kind) noexcept {
  switch (kind) {
  case NodeKind::From:
  case NodeKind::Where:
  case NodeKind::GroupBy:
  case NodeKind::Having:
  case NodeKind::OrderBy:
  case NodeKind::Limit:
    return true;
  default:
    return false;
  }
}

namespace {
void dump(const AstNode &node, int depth, std::ostringstream &out) {
  out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(node.kind);
  if (!node.text.empty())
    out << " '" << node.text << "'";
  out << '\n';
  for (const auto &c : node.children)
    dump(c, depth + 1, out);
}
} // namespace

std::string debug_string(const AstNode &node) {
  std::ostringstream out;
  dump(node, 0, out);
  return out.str();
}

} // namespace astres::sql
