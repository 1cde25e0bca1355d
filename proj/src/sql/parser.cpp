#include "astres/sql/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "astres/error.hpp"

namespace astres::sql {

namespace {

constexpr std::array<std::string_view, 43> kReserved = {
    "all",    "and",     "as",       "asc",    "between", "by",     "case",
    "cross",  "desc",    "distinct", "else",   "end",     "except", "exists",
    "from",   "full",    "glob",     "group",  "having",  "in",     "inner",
    "intersect", "is",   "join",     "left",   "like",    "limit",  "natural",
    "not",    "null",    "offset",   "on",     "or",      "order",  "outer",
    "right",  "select",  "then",     "union",  "using",   "when",   "where",
    "cast",
};

constexpr std::array<std::string_view, 9> kUnsupportedStatements = {
    "insert", "update", "delete", "create", "drop",
    "alter",  "with",   "pragma", "replace",
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_char(char c) {
  return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

enum class Tok { Word, QuotedIdent, String, Number, Symbol, End };

struct Token {
  Tok type;
  std::string text; // words keep their case; strings are unquoted
  std::size_t offset;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> toks;
  std::size_t i = 0;
  const std::size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && src[i + 1] == '-') {
      while (i < n && src[i] != '\n')
        ++i;
      continue;
    }
    std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(src[i]))
        ++i;
      toks.push_back({Tok::Word, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
        ++i;
      if (i < n && src[i] == '.') {
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
          ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-'))
          ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
            ++i;
        }
      }
      if (i < n && is_ident_start(src[i]))
        throw ParseError("malformed number", start);
      toks.push_back({Tok::Number, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (c == '\'' || c == '"' || c == '`' || c == '[') {
      char close = c == '[' ? ']' : c;
      std::string body;
      ++i;
      bool closed = false;
      while (i < n) {
        if (src[i] == close) {
          if (close != ']' && i + 1 < n && src[i + 1] == close) {
            body += close;
            i += 2;
            continue;
          }
          ++i;
          closed = true;
          break;
        }
        body += src[i++];
      }
      if (!closed)
        throw ParseError("unterminated quoted token", start);
      Tok type = (c == '\'' || c == '"') ? Tok::String : Tok::QuotedIdent;
      toks.push_back({type, std::move(body), start});
      continue;
    }
    static constexpr std::array<std::string_view, 6> two = {"<=", ">=", "!=", "<>", "==", "||"};
    if (i + 1 < n) {
      std::string_view pair = src.substr(i, 2);
      if (std::find(two.begin(), two.end(), pair) != two.end()) {
        toks.push_back({Tok::Symbol, std::string(pair), start});
        i += 2;
        continue;
      }
    }
    if (std::string_view("(),.;*+-/%=<>").find(c) != std::string_view::npos) {
      toks.push_back({Tok::Symbol, std::string(1, c), start});
      ++i;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  toks.push_back({Tok::End, "", n});
  return toks;
}

std::string quote_literal(std::string_view body) {
  std::string out = "'";
  for (char c : body) {
    if (c == '\'')
      out += "''";
    else
      out += c;
  }
  out += '\'';
  return out;
}

class Parser {
public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  SqlAst parse_statement() {
    const Token &first = peek();
    if (first.type == Tok::Word) {
      std::string w = lower(first.text);
      if (std::find(kUnsupportedStatements.begin(), kUnsupportedStatements.end(), w) !=
          kUnsupportedStatements.end())
        throw UnsupportedConstruct("unsupported statement: " + first.text);
    }
    AstNode root = parse_query();
    accept_symbol(";");
    if (peek().type != Tok::End)
      fail("unexpected trailing input");
    return SqlAst{std::move(root), Dialect::GenericSqlite};
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token &peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token &advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string &what) const {
    const Token &t = peek();
    std::string near = t.type == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + " near " + near, t.offset);
  }

  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token &t = peek(ahead);
    return t.type == Tok::Word && lower(t.text) == kw;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw))
      return false;
    advance();
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw))
      fail("expected " + lower(kw));
  }
  bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
    const Token &t = peek(ahead);
    return t.type == Tok::Symbol && t.text == s;
  }
  bool accept_symbol(std::string_view s) {
    if (!is_symbol(s))
      return false;
    advance();
    return true;
  }
  void expect_symbol(std::string_view s) {
    if (!accept_symbol(s))
      fail("expected '" + std::string(s) + "'");
  }

  bool is_plain_word(std::size_t ahead = 0) const {
    const Token &t = peek(ahead);
    return t.type == Tok::Word && !is_reserved_word(t.text);
  }

  bool at_query_start() const {
    if (is_kw("select"))
      return true;
    // parenthesised compound operand: "(SELECT" possibly nested
    std::size_t k = 0;
    while (is_symbol("(", k))
      ++k;
    return k > 0 && is_kw("select", k);
  }

  std::string identifier() {
    const Token &t = peek();
    if (t.type == Tok::QuotedIdent || (t.type == Tok::Word && !is_reserved_word(t.text))) {
      std::string s = t.text;
      advance();
      return s;
    }
    fail("expected identifier");
  }

  // After a '.', any word is accepted as a member name.
  std::string member_name() {
    const Token &t = peek();
    if (t.type == Tok::QuotedIdent || t.type == Tok::Word) {
      std::string s = t.text;
      advance();
      return s;
    }
    fail("expected column name");
  }

  AstNode parse_query() {
    AstNode lhs = parse_query_operand();
    for (;;) {
      std::string op;
      if (accept_kw("union"))
        op = accept_kw("all") ? "union all" : "union";
      else if (accept_kw("intersect"))
        op = "intersect";
      else if (accept_kw("except"))
        op = "except";
      else
        break;
      AstNode rhs = parse_query_operand();
      lhs = AstNode(NodeKind::SetOp, op, {std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  AstNode parse_query_operand() {
    if (accept_symbol("(")) {
      AstNode q = parse_query();
      expect_symbol(")");
      return q;
    }
    return parse_select();
  }

  AstNode parse_select() {
    expect_kw("select");
    AstNode sel(NodeKind::Select, "");
    if (accept_kw("distinct"))
      sel.text = "distinct";
    else
      accept_kw("all");
    do {
      sel.children.push_back(parse_result_column());
    } while (accept_symbol(","));

    if (accept_kw("from"))
      sel.children.push_back(parse_from());
    if (accept_kw("where"))
      sel.children.emplace_back(NodeKind::Where, "", std::vector<AstNode>{parse_expr()});
    if (accept_kw("group")) {
      expect_kw("by");
      AstNode g(NodeKind::GroupBy, "");
      do {
        g.children.push_back(parse_expr());
      } while (accept_symbol(","));
      sel.children.push_back(std::move(g));
    }
    if (accept_kw("having"))
      sel.children.emplace_back(NodeKind::Having, "", std::vector<AstNode>{parse_expr()});
    if (accept_kw("order")) {
      expect_kw("by");
      AstNode o(NodeKind::OrderBy, "");
      do {
        AstNode e = parse_expr();
        if (accept_kw("asc"))
          e = AstNode(NodeKind::Operator, "asc", {std::move(e)});
        else if (accept_kw("desc"))
          e = AstNode(NodeKind::Operator, "desc", {std::move(e)});
        o.children.push_back(std::move(e));
      } while (accept_symbol(","));
      sel.children.push_back(std::move(o));
    }
    if (accept_kw("limit")) {
      AstNode l(NodeKind::Limit, "");
      AstNode first = parse_expr();
      if (accept_kw("offset")) {
        l.children = {std::move(first), parse_expr()};
      } else if (accept_symbol(",")) {
        AstNode count = parse_expr();
        l.children = {std::move(count), std::move(first)};
      } else {
        l.children = {std::move(first)};
      }
      sel.children.push_back(std::move(l));
    }
    return sel;
  }

  std::optional<std::string> parse_alias_name() {
    if (accept_kw("as"))
      return identifier();
    const Token &t = peek();
    if (t.type == Tok::QuotedIdent || is_plain_word())
      return identifier();
    return std::nullopt;
  }

  AstNode parse_result_column() {
    if (is_symbol("*")) {
      advance();
      return AstNode(NodeKind::Star, "");
    }
    AstNode e = parse_expr();
    if (auto a = parse_alias_name())
      return AstNode(NodeKind::Alias, *a, {std::move(e)});
    return e;
  }

  AstNode parse_table_source() {
    AstNode src;
    if (accept_symbol("(")) {
      if (!at_query_start())
        fail("expected subquery");
      src = AstNode(NodeKind::Subquery, "", {parse_query()});
      expect_symbol(")");
    } else {
      src = AstNode(NodeKind::TableRef, identifier());
    }
    if (auto a = parse_alias_name())
      return AstNode(NodeKind::Alias, *a, {std::move(src)});
    return src;
  }

  std::optional<std::string> parse_join_operator() {
    if (accept_symbol(","))
      return std::string(",");
    std::string kind;
    auto append = [&](std::string_view w) {
      if (!kind.empty())
        kind += ' ';
      kind += w;
    };
    std::size_t save = pos_;
    if (accept_kw("natural"))
      append("natural");
    if (accept_kw("left")) {
      append("left");
      if (accept_kw("outer"))
        append("outer");
    } else if (accept_kw("right") || accept_kw("full")) {
      throw UnsupportedConstruct("RIGHT/FULL joins are outside the supported subset");
    } else if (accept_kw("inner")) {
      append("inner");
    } else if (accept_kw("cross")) {
      append("cross");
    }
    if (accept_kw("join"))
      return kind;
    pos_ = save;
    return std::nullopt;
  }

  AstNode parse_from() {
    AstNode from(NodeKind::From, "", {parse_table_source()});
    while (auto op = parse_join_operator()) {
      AstNode join(NodeKind::Join, *op, {parse_table_source()});
      if (accept_kw("on"))
        join.children.emplace_back(NodeKind::On, "", std::vector<AstNode>{parse_expr()});
      else if (is_kw("using"))
        throw UnsupportedConstruct("JOIN ... USING is outside the supported subset");
      from.children.push_back(std::move(join));
    }
    return from;
  }

  AstNode parse_expr() { return parse_or(); }

  AstNode parse_or() {
    AstNode lhs = parse_and();
    while (accept_kw("or"))
      lhs = AstNode(NodeKind::Operator, "or", {std::move(lhs), parse_and()});
    return lhs;
  }

  AstNode parse_and() {
    AstNode lhs = parse_not();
    while (accept_kw("and"))
      lhs = AstNode(NodeKind::Operator, "and", {std::move(lhs), parse_not()});
    return lhs;
  }

  AstNode parse_not() {
    if (accept_kw("not"))
      return AstNode(NodeKind::Operator, "not", {parse_not()});
    return parse_predicate();
  }

  AstNode parse_in_rhs(AstNode lhs, std::string op) {
    expect_symbol("(");
    AstNode node(NodeKind::Operator, std::move(op), {std::move(lhs)});
    if (at_query_start()) {
      node.children.emplace_back(NodeKind::Subquery, "", std::vector<AstNode>{parse_query()});
    } else {
      do {
        node.children.push_back(parse_expr());
      } while (accept_symbol(","));
    }
    expect_symbol(")");
    return node;
  }

  AstNode parse_predicate() {
    AstNode lhs = parse_additive();
    const Token &t = peek();
    if (t.type == Tok::Symbol) {
      static constexpr std::array<std::string_view, 8> cmp = {"=", "==", "!=", "<>", "<", "<=", ">", ">="};
      if (std::find(cmp.begin(), cmp.end(), t.text) != cmp.end()) {
        std::string op = t.text == "==" ? "=" : t.text == "<>" ? "!=" : t.text;
        advance();
        return AstNode(NodeKind::Operator, op, {std::move(lhs), parse_additive()});
      }
      return lhs;
    }
    bool negated = false;
    if (is_kw("not") && (is_kw("like", 1) || is_kw("in", 1) || is_kw("between", 1) || is_kw("glob", 1))) {
      advance();
      negated = true;
    }
    std::string prefix = negated ? "not " : "";
    if (accept_kw("like"))
      return AstNode(NodeKind::Operator, prefix + "like", {std::move(lhs), parse_additive()});
    if (accept_kw("glob"))
      return AstNode(NodeKind::Operator, prefix + "glob", {std::move(lhs), parse_additive()});
    if (accept_kw("in"))
      return parse_in_rhs(std::move(lhs), prefix + "in");
    if (accept_kw("between")) {
      AstNode lo = parse_additive();
      expect_kw("and");
      AstNode hi = parse_additive();
      return AstNode(NodeKind::Operator, prefix + "between", {std::move(lhs), std::move(lo), std::move(hi)});
    }
    if (accept_kw("is")) {
      std::string op = accept_kw("not") ? "is not" : "is";
      return AstNode(NodeKind::Operator, op, {std::move(lhs), parse_additive()});
    }
    return lhs;
  }

  AstNode parse_additive() {
    AstNode lhs = parse_multiplicative();
    while (is_symbol("+") || is_symbol("-") || is_symbol("||")) {
      std::string op = advance().text;
      lhs = AstNode(NodeKind::Operator, op, {std::move(lhs), parse_multiplicative()});
    }
    return lhs;
  }

  AstNode parse_multiplicative() {
    AstNode lhs = parse_unary();
    while (is_symbol("*") || is_symbol("/") || is_symbol("%")) {
      std::string op = advance().text;
      lhs = AstNode(NodeKind::Operator, op, {std::move(lhs), parse_unary()});
    }
    return lhs;
  }

  AstNode parse_unary() {
    if (is_symbol("-")) {
      advance();
      if (peek().type == Tok::Number)
        return AstNode(NodeKind::Literal, "-" + advance().text);
      return AstNode(NodeKind::Operator, "-", {parse_unary()});
    }
    if (is_symbol("+")) {
      advance();
      return parse_unary();
    }
    return parse_primary();
  }

  AstNode parse_function(std::string name) {
    expect_symbol("(");
    AstNode fn(NodeKind::Function, lower(name));
    if (accept_symbol(")"))
      return fn;
    if (accept_symbol("*")) {
      fn.children.emplace_back(NodeKind::Star, "");
      expect_symbol(")");
      return fn;
    }
    bool distinct = accept_kw("distinct");
    do {
      AstNode arg = parse_expr();
      if (distinct) {
        arg = AstNode(NodeKind::Operator, "distinct", {std::move(arg)});
        distinct = false;
      }
      fn.children.push_back(std::move(arg));
    } while (accept_symbol(","));
    expect_symbol(")");
    return fn;
  }

  AstNode parse_primary() {
    const Token &t = peek();
    switch (t.type) {
    case Tok::Number:
      return AstNode(NodeKind::Literal, advance().text);
    case Tok::String:
      return AstNode(NodeKind::Literal, quote_literal(advance().text));
    case Tok::Symbol:
      if (t.text == "(") {
        if (at_query_start()) {
          advance();
          AstNode q(NodeKind::Subquery, "", {parse_query()});
          expect_symbol(")");
          return q;
        }
        advance();
        AstNode e = parse_expr();
        expect_symbol(")");
        return e;
      }
      fail("expected expression");
    case Tok::End:
      fail("expected expression");
    case Tok::QuotedIdent:
    case Tok::Word:
      break;
    }

    if (t.type == Tok::Word) {
      std::string w = lower(t.text);
      if (w == "case" || w == "cast")
        throw UnsupportedConstruct(w + " expressions are outside the supported subset");
      if (w == "null") {
        advance();
        return AstNode(NodeKind::Literal, "NULL");
      }
      if (w == "exists") {
        advance();
        expect_symbol("(");
        if (!at_query_start())
          fail("expected subquery");
        AstNode q(NodeKind::Subquery, "", {parse_query()});
        expect_symbol(")");
        return AstNode(NodeKind::Operator, "exists", {std::move(q)});
      }
      if (!is_reserved_word(t.text) && is_symbol("(", 1)) {
        std::string name = advance().text;
        return parse_function(std::move(name));
      }
    }

    std::string first = identifier();
    if (accept_symbol(".")) {
      if (accept_symbol("*"))
        return AstNode(NodeKind::Star, first);
      return AstNode(NodeKind::ColumnRef, first + "." + member_name());
    }
    return AstNode(NodeKind::ColumnRef, first);
  }
};

} // namespace

bool is_reserved_word(std::string_view word) noexcept {
  std::string w = lower(word);
  return std::find(kReserved.begin(), kReserved.end(), w) != kReserved.end();
}

SqlAst parse_sql(std::string_view text) {
  Parser p(text);
  return p.parse_statement();
}

} // namespace astres::sql
