#include "astres/sql/normalize.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <utility>

#include "astres/error.hpp"
#include "astres/sql/render.hpp"

namespace astres::sql {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::pair<std::string, std::string> split_qualified(const std::string &text) {
  auto dot = text.find('.');
  if (dot == std::string::npos)
    return {"", text};
  return {text.substr(0, dot), text.substr(dot + 1)};
}

struct Binding {
  std::string name;
  bool derived = false;
  std::string table;
};

struct Scope {
  const Scope *outer = nullptr;
  std::vector<Binding> bindings;
  std::vector<std::string> tables;
  std::size_t n_sources = 0;

  const std::string *sole_table() const {
    return n_sources == 1 && tables.size() == 1 ? &tables.front() : nullptr;
  }
};

// Rewrites a query in place (steps 1 and 2). When `uses` is set, every
// resolved column reference is also recorded there.
class Resolver {
public:
  explicit Resolver(QueryRefs *uses) : uses_(uses) {}

  void query(AstNode &q, const Scope *outer) {
    if (q.kind == NodeKind::SetOp) {
      for (auto &c : q.children)
        query(c, outer);
      return;
    }
    if (q.kind != NodeKind::Select)
      return;

    Scope scope;
    scope.outer = outer;
    for (auto &c : q.children)
      if (c.kind == NodeKind::From)
        bind_sources(c, scope, outer);

    std::map<std::string, AstNode> projected;
    for (auto &c : q.children) {
      if (is_clause(c.kind))
        continue;
      if (c.kind == NodeKind::Alias) {
        std::string name = lower(c.text);
        AstNode inner = std::move(c.children.front());
        expr(inner, scope, nullptr);
        c = std::move(inner);
        projected.emplace(name, c);
      } else {
        expr(c, scope, nullptr);
      }
    }

    for (auto &c : q.children) {
      switch (c.kind) {
      case NodeKind::From:
        for (auto &j : c.children)
          if (j.kind == NodeKind::Join)
            for (auto &on : j.children)
              if (on.kind == NodeKind::On)
                expr(on.children.front(), scope, nullptr);
        break;
      case NodeKind::Where:
      case NodeKind::Limit:
        for (auto &e : c.children)
          expr(e, scope, nullptr);
        break;
      case NodeKind::GroupBy:
      case NodeKind::Having:
      case NodeKind::OrderBy:
        for (auto &e : c.children)
          expr(e, scope, &projected);
        break;
      default:
        break;
      }
    }
  }

private:
  QueryRefs *uses_;

  void bind_sources(AstNode &from, Scope &scope, const Scope *outer) {
    auto bind = [&](AstNode &src) {
      ++scope.n_sources;
      if (src.kind == NodeKind::TableRef) {
        src.text = lower(src.text);
        scope.bindings.push_back({src.text, false, src.text});
        scope.tables.push_back(src.text);
        if (uses_)
          uses_->tables.push_back(src.text);
      } else if (src.kind == NodeKind::Subquery) {
        query(src.children.front(), outer);
      } else if (src.kind == NodeKind::Alias) {
        std::string name = lower(src.text);
        AstNode inner = std::move(src.children.front());
        src = std::move(inner);
        if (src.kind == NodeKind::TableRef) {
          src.text = lower(src.text);
          scope.bindings.push_back({name, false, src.text});
          scope.bindings.push_back({src.text, false, src.text});
          scope.tables.push_back(src.text);
          if (uses_)
            uses_->tables.push_back(src.text);
        } else {
          scope.bindings.push_back({name, true, ""});
          query(src.children.front(), outer);
        }
      }
    };
    for (auto &c : from.children) {
      if (c.kind == NodeKind::Join)
        bind(c.children.front());
      else
        bind(c);
    }
  }

  // Returns the binding and whether it belongs to the innermost scope.
  std::pair<const Binding *, bool> lookup(const std::string &name, const Scope &scope) const {
    bool local = true;
    for (const Scope *s = &scope; s; s = s->outer, local = false)
      for (const auto &b : s->bindings)
        if (b.name == name)
          return {&b, local};
    return {nullptr, false};
  }

  std::vector<std::string> scope_chain(const Scope &scope) const {
    std::vector<std::string> out;
    for (const Scope *s = &scope; s; s = s->outer)
      out.insert(out.end(), s->tables.begin(), s->tables.end());
    return out;
  }

  void column(AstNode &n, const Scope &scope) {
    auto [qual, col] = split_qualified(lower(n.text));
    ColumnUse use;
    use.column = col;
    if (qual.empty()) {
      n.text = col;
      if (const std::string *t = scope.sole_table())
        use.table = *t;
    } else {
      auto [b, local] = lookup(qual, scope);
      if (!b)
        throw UnresolvableAlias("undefined table or alias '" + qual + "' in '" + n.text + "'");
      use.qualified = true;
      if (b->derived) {
        use.via_derived = true;
        n.text = col;
      } else {
        use.table = b->table;
        const std::string *sole = scope.sole_table();
        n.text = (local && sole && *sole == b->table) ? col : b->table + "." + col;
      }
    }
    if (uses_) {
      if (!use.qualified)
        use.scope_tables = scope_chain(scope);
      uses_->columns.push_back(std::move(use));
    }
  }

  void star(AstNode &n, const Scope &scope) {
    if (n.text.empty())
      return;
    std::string qual = lower(n.text);
    auto [b, local] = lookup(qual, scope);
    if (!b)
      throw UnresolvableAlias("undefined table or alias '" + qual + "' in '" + qual + ".*'");
    const std::string *sole = scope.sole_table();
    if (b->derived || (local && sole && *sole == b->table))
      n.text.clear();
    else
      n.text = b->table;
  }

  void expr(AstNode &n, const Scope &scope, const std::map<std::string, AstNode> *projected) {
    switch (n.kind) {
    case NodeKind::ColumnRef:
      if (projected && n.text.find('.') == std::string::npos) {
        auto it = projected->find(lower(n.text));
        if (it != projected->end()) {
          n = it->second;
          return;
        }
      }
      column(n, scope);
      return;
    case NodeKind::Star:
      star(n, scope);
      return;
    case NodeKind::Subquery:
      query(n.children.front(), &scope);
      return;
    case NodeKind::Alias: {
      AstNode inner = std::move(n.children.front());
      n = std::move(inner);
      expr(n, scope, projected);
      return;
    }
    default:
      for (auto &c : n.children)
        expr(c, scope, projected);
    }
  }
};

bool sortable_joins(const AstNode &from) {
  for (const auto &c : from.children)
    if (c.kind == NodeKind::Join && !(c.text.empty() || c.text == "inner" || c.text == ","))
      return false;
  return true;
}

void order_equalities(AstNode &cond) {
  if (cond.kind != NodeKind::Operator)
    return;
  if (cond.text == "and") {
    for (auto &c : cond.children)
      order_equalities(c);
  } else if (cond.text == "=") {
    if (render(cond.children[1]) < render(cond.children[0]))
      std::swap(cond.children[0], cond.children[1]);
  }
}

void reorder_joins(AstNode &n) {
  for (auto &c : n.children)
    reorder_joins(c);
  if (n.kind != NodeKind::From)
    return;
  for (auto &j : n.children)
    if (j.kind == NodeKind::Join)
      for (auto &on : j.children)
        if (on.kind == NodeKind::On)
          order_equalities(on.children.front());
  if (!sortable_joins(n) || n.children.size() < 2)
    return;

  std::vector<AstNode *> slots;
  for (auto &c : n.children)
    slots.push_back(c.kind == NodeKind::Join ? &c.children.front() : &c);
  std::vector<std::pair<std::string, AstNode>> keyed;
  for (AstNode *s : slots)
    keyed.emplace_back(render(*s), std::move(*s));
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  for (std::size_t i = 0; i < slots.size(); ++i)
    *slots[i] = std::move(keyed[i].second);
}

void mask(AstNode &n) {
  switch (n.kind) {
  case NodeKind::TableRef:
  case NodeKind::ColumnRef:
  case NodeKind::Literal:
    n.text = "_";
    break;
  case NodeKind::Star:
    if (!n.text.empty())
      n.text = "_";
    break;
  default:
    break;
  }
  for (auto &c : n.children)
    mask(c);
}

} // namespace

NormalizedAst normalize(const SqlAst &ast, NormMode mode) {
  AstNode root = ast.root;
  Resolver(nullptr).query(root, nullptr);
  if (mode == NormMode::InDomain)
    reorder_joins(root);
  else
    mask(root);
  return NormalizedAst{std::move(root), mode};
}

NormalizedAst normalize(const NormalizedAst &ast, NormMode mode) {
  return normalize(SqlAst{ast.root, Dialect::GenericSqlite}, mode);
}

QueryRefs collect_refs(const SqlAst &ast) {
  QueryRefs refs;
  AstNode root = ast.root;
  Resolver(&refs).query(root, nullptr);
  return refs;
}

std::size_t count_unique_columns(const SqlAst &ast) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto &u : collect_refs(ast).columns)
    seen.emplace(u.table, u.column);
  return seen.size();
}

} // namespace astres::sql
