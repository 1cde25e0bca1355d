#include "astres/sql/render.hpp"

#include <cctype>
#include <string>

#include "astres/sql/parser.hpp"

namespace astres::sql {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_plain_identifier(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
    return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || u >= 0x80))
      return false;
  }
  return true;
}

std::string ident(std::string_view s) {
  if (s == "_" || (is_plain_identifier(s) && !is_reserved_word(s)))
    return std::string(s);
  std::string out = "`";
  for (char c : s) {
    if (c == '`')
      out += "``";
    else
      out += c;
  }
  return out + "`";
}

// Qualified member names are always accepted by the parser, so only the
// qualifier needs reserved-word quoting.
std::string qualified(std::string_view s) {
  auto dot = s.find('.');
  if (dot == std::string_view::npos)
    return ident(s);
  std::string_view member = s.substr(dot + 1);
  std::string m = is_plain_identifier(member) || member == "_" ? std::string(member) : ident(member);
  return ident(s.substr(0, dot)) + "." + m;
}

enum Prec { kOr = 1, kAnd = 2, kNot = 3, kCmp = 4, kAdd = 5, kMul = 6, kUnary = 7, kAtom = 8 };

int precedence(const AstNode &n) {
  if (n.kind != NodeKind::Operator)
    return kAtom;
  const std::string &op = n.text;
  if (op == "or")
    return kOr;
  if (op == "and")
    return kAnd;
  if (op == "not")
    return kNot;
  if (op == "+" || op == "||" || (op == "-" && n.children.size() == 2))
    return kAdd;
  if (op == "*" || op == "/" || op == "%")
    return kMul;
  if (op == "-")
    return kUnary;
  if (op == "exists")
    return kAtom;
  return kCmp;
}

void emit(const AstNode &n, std::string &out);

void emit_operand(const AstNode &child, bool parens, std::string &out) {
  if (parens)
    out += '(';
  emit(child, out);
  if (parens)
    out += ')';
}

void emit_list(const std::vector<AstNode> &items, std::size_t from, std::size_t to, std::string &out) {
  for (std::size_t i = from; i < to; ++i) {
    if (i > from)
      out += ", ";
    emit(items[i], out);
  }
}

void emit_operator(const AstNode &n, std::string &out) {
  const std::string &op = n.text;
  const int p = precedence(n);
  const auto &c = n.children;

  if (op == "asc" || op == "desc") {
    emit(c[0], out);
    out += ' ';
    out += upper(op);
    return;
  }
  if (op == "distinct") {
    out += "DISTINCT ";
    emit(c[0], out);
    return;
  }
  if (op == "exists") {
    out += "EXISTS ";
    emit(c[0], out);
    return;
  }
  if (op == "not") {
    out += "NOT ";
    emit_operand(c[0], precedence(c[0]) < kNot, out);
    return;
  }
  if (op == "-" && c.size() == 1) {
    out += '-';
    emit_operand(c[0], precedence(c[0]) < kUnary || c[0].kind == NodeKind::Literal, out);
    return;
  }
  if (op == "in" || op == "not in") {
    emit_operand(c[0], precedence(c[0]) <= kCmp, out);
    out += ' ';
    out += upper(op);
    out += ' ';
    if (c.size() == 2 && c[1].kind == NodeKind::Subquery) {
      emit(c[1], out);
    } else {
      out += '(';
      emit_list(c, 1, c.size(), out);
      out += ')';
    }
    return;
  }
  if (op == "between" || op == "not between") {
    emit_operand(c[0], precedence(c[0]) <= kCmp, out);
    out += ' ';
    out += upper(op);
    out += ' ';
    emit_operand(c[1], precedence(c[1]) <= kCmp, out);
    out += " AND ";
    emit_operand(c[2], precedence(c[2]) <= kCmp, out);
    return;
  }
  // binary, left-associative
  bool lparen = p == kCmp ? precedence(c[0]) <= kCmp : precedence(c[0]) < p;
  emit_operand(c[0], lparen, out);
  out += ' ';
  out += p == kCmp || p <= kAnd ? upper(op) : op;
  out += ' ';
  emit_operand(c[1], precedence(c[1]) <= p, out);
}

void emit_select(const AstNode &n, std::string &out) {
  out += "SELECT ";
  if (n.text == "distinct")
    out += "DISTINCT ";
  std::size_t first_clause = 0;
  while (first_clause < n.children.size() && !is_clause(n.children[first_clause].kind))
    ++first_clause;
  emit_list(n.children, 0, first_clause, out);
  for (std::size_t i = first_clause; i < n.children.size(); ++i) {
    out += ' ';
    emit(n.children[i], out);
  }
}

void emit(const AstNode &n, std::string &out) {
  switch (n.kind) {
  case NodeKind::Select:
    emit_select(n, out);
    return;
  case NodeKind::From:
    out += "FROM ";
    emit(n.children[0], out);
    for (std::size_t i = 1; i < n.children.size(); ++i)
      emit(n.children[i], out);
    return;
  case NodeKind::Join:
    if (n.text == ",") {
      out += ", ";
    } else {
      out += ' ';
      if (!n.text.empty())
        out += upper(n.text) + ' ';
      out += "JOIN ";
    }
    emit(n.children[0], out);
    for (std::size_t i = 1; i < n.children.size(); ++i) {
      out += ' ';
      emit(n.children[i], out);
    }
    return;
  case NodeKind::On:
    out += "ON ";
    emit(n.children[0], out);
    return;
  case NodeKind::Where:
    out += "WHERE ";
    emit(n.children[0], out);
    return;
  case NodeKind::GroupBy:
    out += "GROUP BY ";
    emit_list(n.children, 0, n.children.size(), out);
    return;
  case NodeKind::Having:
    out += "HAVING ";
    emit(n.children[0], out);
    return;
  case NodeKind::OrderBy:
    out += "ORDER BY ";
    emit_list(n.children, 0, n.children.size(), out);
    return;
  case NodeKind::Limit:
    out += "LIMIT ";
    emit(n.children[0], out);
    if (n.children.size() > 1) {
      out += " OFFSET ";
      emit(n.children[1], out);
    }
    return;
  case NodeKind::SetOp: {
    emit(n.children[0], out);
    out += ' ';
    out += upper(n.text);
    out += ' ';
    bool nested = n.children[1].kind == NodeKind::SetOp;
    emit_operand(n.children[1], nested, out);
    return;
  }
  case NodeKind::Function:
    out += upper(n.text);
    out += '(';
    emit_list(n.children, 0, n.children.size(), out);
    out += ')';
    return;
  case NodeKind::TableRef:
    out += ident(n.text);
    return;
  case NodeKind::ColumnRef:
    out += qualified(n.text);
    return;
  case NodeKind::Alias:
    emit(n.children[0], out);
    out += " AS ";
    out += ident(n.text);
    return;
  case NodeKind::Literal:
    out += n.text;
    return;
  case NodeKind::Operator:
    emit_operator(n, out);
    return;
  case NodeKind::Star:
    if (!n.text.empty())
      out += ident(n.text) + ".";
    out += '*';
    return;
  case NodeKind::Subquery:
    out += '(';
    emit(n.children[0], out);
    out += ')';
    return;
  }
}

} // namespace

std::string render(const AstNode &node) {
  std::string out;
  emit(node, out);
  return out;
}

} // namespace astres::sql
