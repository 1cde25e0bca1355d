#include "astres/sql/diff.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "astres/error.hpp"
#include "astres/sql/render.hpp"

namespace astres::sql {

namespace {

constexpr double kLeafThreshold = 0.6;
constexpr double kInnerThreshold = 0.6;

std::vector<std::uint16_t> bigrams(std::string_view s) {
  std::vector<std::uint16_t> out;
  if (s.size() < 2)
    return out;
  out.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    out.push_back(static_cast<std::uint16_t>((static_cast<unsigned char>(s[i]) << 8) |
                                             static_cast<unsigned char>(s[i + 1])));
  std::sort(out.begin(), out.end());
  return out;
}

double dice_sorted(const std::vector<std::uint16_t> &a, const std::vector<std::uint16_t> &b) {
  if (a.empty() && b.empty())
    return 0.0;
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

double text_similarity(const PreparedTree::Node &a, const PreparedTree::Node &b) {
  if (a.text.size() < 2 || b.text.size() < 2)
    return a.text == b.text ? 1.0 : 0.0;
  return dice_sorted(a.text_bigrams, b.text_bigrams);
}

void flatten(const AstNode &n, std::optional<std::size_t> parent, std::size_t child_index,
             std::vector<PreparedTree::Node> &out) {
  std::size_t id = out.size();
  out.push_back({n.kind, n.text, parent, child_index, 0, bigrams(n.text), {}, {}});
  if (!n.is_leaf()) {
    out[id].subtree_text = render(n);
    out[id].subtree_bigrams = bigrams(out[id].subtree_text);
  }
  for (std::size_t i = 0; i < n.children.size(); ++i)
    flatten(n.children[i], id, i, out);
  out[id].end = out.size();
}

struct Matching {
  std::vector<long> s2t;
  std::vector<long> t2s;
};

Matching match(const PreparedTree &src, const PreparedTree &dst) {
  const auto &S = src.nodes();
  const auto &T = dst.nodes();
  Matching m{std::vector<long>(S.size(), -1), std::vector<long>(T.size(), -1)};

  std::vector<std::size_t> s_leaves, t_leaves, s_inner, t_inner;
  for (std::size_t i = 0; i < S.size(); ++i)
    (S[i].end == i + 1 ? s_leaves : s_inner).push_back(i);
  for (std::size_t i = 0; i < T.size(); ++i)
    (T[i].end == i + 1 ? t_leaves : t_inner).push_back(i);

  // Context of a leaf pair: Dice of the rendered subtrees of their
  // ancestors, parent first, up to the shallower root.
  std::unordered_map<std::size_t, double> ancestor_sim;
  auto asim = [&](std::size_t ps, std::size_t pt) {
    std::size_t key = ps * T.size() + pt;
    auto it = ancestor_sim.find(key);
    if (it != ancestor_sim.end())
      return it->second;
    double v = dice_sorted(S[ps].subtree_bigrams, T[pt].subtree_bigrams);
    ancestor_sim.emplace(key, v);
    return v;
  };
  auto context = [&](std::size_t s, std::size_t t) {
    std::vector<double> out;
    auto ps = S[s].parent;
    auto pt = T[t].parent;
    while (ps && pt) {
      out.push_back(asim(*ps, *pt));
      ps = S[*ps].parent;
      pt = T[*pt].parent;
    }
    return out;
  };

  struct LeafCand {
    double sim;
    std::vector<double> context;
    std::size_t s, t;
  };
  std::vector<LeafCand> leaves;
  for (std::size_t s : s_leaves)
    for (std::size_t t : t_leaves) {
      if (S[s].kind != T[t].kind)
        continue;
      double sim = text_similarity(S[s], T[t]);
      if (sim >= kLeafThreshold)
        leaves.push_back({sim, context(s, t), s, t});
    }
  std::sort(leaves.begin(), leaves.end(), [](const LeafCand &a, const LeafCand &b) {
    if (a.sim != b.sim)
      return a.sim > b.sim;
    if (a.context != b.context)
      return a.context > b.context;
    if (a.s != b.s)
      return a.s < b.s;
    return a.t < b.t;
  });
  for (const auto &c : leaves) {
    if (m.s2t[c.s] < 0 && m.t2s[c.t] < 0) {
      m.s2t[c.s] = static_cast<long>(c.t);
      m.t2s[c.t] = static_cast<long>(c.s);
    }
  }

  if (!S.empty() && !T.empty() && S[0].kind == T[0].kind) {
    m.s2t[0] = 0;
    m.t2s[0] = 0;
  }

  auto leaf_count = [](const std::vector<PreparedTree::Node> &nodes, std::size_t id) {
    std::size_t n = 0;
    for (std::size_t i = id; i < nodes[id].end; ++i)
      n += nodes[i].end == i + 1;
    return n;
  };

  struct InnerCand {
    double score, text_sim, coverage;
    std::size_t s, t;
  };
  std::vector<InnerCand> inner;
  for (std::size_t s : s_inner) {
    if (m.s2t[s] >= 0)
      continue;
    std::size_t ls = leaf_count(S, s);
    for (std::size_t t : t_inner) {
      if (m.t2s[t] >= 0 || S[s].kind != T[t].kind)
        continue;
      std::size_t lt = leaf_count(T, t);
      std::size_t common = 0;
      for (std::size_t i = s; i < S[s].end; ++i) {
        if (S[i].end != i + 1 || m.s2t[i] < 0)
          continue;
        auto mt = static_cast<std::size_t>(m.s2t[i]);
        common += mt >= t && mt < T[t].end;
      }
      double score = static_cast<double>(common) / static_cast<double>(std::min(ls, lt));
      if (score >= kInnerThreshold)
        inner.push_back({score, text_similarity(S[s], T[t]),
                         static_cast<double>(common) / static_cast<double>(std::max(ls, lt)), s, t});
    }
  }
  std::sort(inner.begin(), inner.end(), [](const InnerCand &a, const InnerCand &b) {
    if (a.score != b.score)
      return a.score > b.score;
    if (a.text_sim != b.text_sim)
      return a.text_sim > b.text_sim;
    if (a.coverage != b.coverage)
      return a.coverage > b.coverage;
    if (a.s != b.s)
      return a.s < b.s;
    return a.t < b.t;
  });
  for (const auto &c : inner) {
    if (m.s2t[c.s] < 0 && m.t2s[c.t] < 0) {
      m.s2t[c.s] = static_cast<long>(c.t);
      m.t2s[c.t] = static_cast<long>(c.s);
    }
  }
  return m;
}

} // namespace

std::string_view to_string(EditKind kind) noexcept {
  switch (kind) {
  case EditKind::Insert: return "insert";
  case EditKind::Delete: return "delete";
  case EditKind::Update: return "update";
  case EditKind::Move: return "move";
  case EditKind::Alignment: return "alignment";
  }
  return "?";
}

std::size_t EditScript::count(EditKind kind) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(), [kind](const EditOp &op) { return op.kind == kind; }));
}

PreparedTree::PreparedTree(const NormalizedAst &ast) : mode_(ast.mode) {
  flatten(ast.root, std::nullopt, 0, nodes_);
}

NodeRef PreparedTree::ref(std::size_t id) const {
  const Node &n = nodes_.at(id);
  return NodeRef{id, n.parent, n.child_index, n.kind, n.text};
}

double dice(std::string_view a, std::string_view b) {
  if (a.size() < 2 || b.size() < 2)
    return a == b ? 1.0 : 0.0;
  return dice_sorted(bigrams(a), bigrams(b));
}

EditScript diff(const PreparedTree &source, const PreparedTree &target) {
  if (source.mode() != target.mode())
    throw ModeMismatch(std::string("cannot diff ") + std::string(to_string(source.mode())) +
                       " tree against " + std::string(to_string(target.mode())) + " tree");
  const auto &S = source.nodes();
  const auto &T = target.nodes();
  Matching m = match(source, target);

  EditScript script;
  script.target_size = target.nodes().size();
  for (std::size_t s = 0; s < S.size(); ++s) {
    if (m.s2t[s] < 0) {
      script.ops.push_back({EditKind::Delete, source.ref(s), std::nullopt});
      continue;
    }
    auto t = static_cast<std::size_t>(m.s2t[s]);
    bool parents_matched;
    if (!S[s].parent || !T[t].parent)
      parents_matched = !S[s].parent && !T[t].parent;
    else
      parents_matched = m.s2t[*S[s].parent] == static_cast<long>(*T[t].parent);
    bool updated = S[s].text != T[t].text;
    if (updated)
      script.ops.push_back({EditKind::Update, source.ref(s), target.ref(t)});
    if (!parents_matched)
      script.ops.push_back({EditKind::Move, source.ref(s), target.ref(t)});
    if (!updated && parents_matched)
      script.ops.push_back({EditKind::Alignment, source.ref(s), target.ref(t)});
  }
  for (std::size_t t = 0; t < T.size(); ++t)
    if (m.t2s[t] < 0)
      script.ops.push_back({EditKind::Insert, std::nullopt, target.ref(t)});
  return script;
}

EditScript diff(const NormalizedAst &source, const NormalizedAst &target) {
  return diff(PreparedTree(source), PreparedTree(target));
}

AstSimilarity similarity(const PreparedTree &source, const PreparedTree &target) {
  EditScript script = diff(source, target);
  AstSimilarity out;
  out.n_alignments = script.count(EditKind::Alignment);
  out.n_total_ops = script.ops.size();
  out.score = out.n_total_ops == 0
                  ? 1.0
                  : static_cast<double>(out.n_alignments) / static_cast<double>(out.n_total_ops);
  return out;
}

AstSimilarity similarity(const NormalizedAst &source, const NormalizedAst &target) {
  return similarity(PreparedTree(source), PreparedTree(target));
}

AstNode apply_script(const AstNode &source, const EditScript &script) {
  std::vector<PreparedTree::Node> S;
  flatten(source, std::nullopt, 0, S);

  struct Pending {
    std::optional<std::size_t> source;
    const NodeRef *target = nullptr;
    bool updated = false;
    bool moved = false;
    bool aligned = false;
  };
  std::map<std::size_t, Pending> by_target;
  std::vector<int> source_seen(S.size(), 0);
  std::map<std::size_t, std::size_t> image;

  auto check_source = [&](const NodeRef &r) {
    if (r.id >= S.size() || S[r.id].kind != r.kind || S[r.id].text != r.text)
      throw std::invalid_argument("edit op references a node not in the source tree");
  };

  for (const EditOp &op : script.ops) {
    switch (op.kind) {
    case EditKind::Delete:
      check_source(*op.source);
      ++source_seen[op.source->id];
      break;
    case EditKind::Insert: {
      Pending &p = by_target[op.target->id];
      if (p.target)
        throw std::invalid_argument("target node produced twice");
      p.target = &*op.target;
      break;
    }
    default: {
      check_source(*op.source);
      Pending &p = by_target[op.target->id];
      if (p.target && p.source != op.source->id)
        throw std::invalid_argument("target node produced twice");
      if (!p.target)
        ++source_seen[op.source->id];
      p.target = &*op.target;
      p.source = op.source->id;
      image[op.source->id] = op.target->id;
      if ((op.kind == EditKind::Update && p.updated) || (op.kind == EditKind::Move && p.moved) ||
          (op.kind == EditKind::Alignment && p.aligned))
        throw std::invalid_argument("edit op repeated");
      p.updated |= op.kind == EditKind::Update;
      p.moved |= op.kind == EditKind::Move;
      p.aligned |= op.kind == EditKind::Alignment;
      if (p.aligned && (p.updated || p.moved))
        throw std::invalid_argument("aligned node also updated or moved");
    }
    }
  }
  for (int seen : source_seen)
    if (seen != 1)
      throw std::invalid_argument("source node not consumed exactly once");
  if (by_target.size() != script.target_size ||
      (!by_target.empty() && by_target.rbegin()->first + 1 != script.target_size))
    throw std::invalid_argument("target node not produced exactly once");

  struct Built {
    NodeKind kind;
    std::string text;
    std::optional<std::size_t> parent;
    std::size_t child_index;
  };
  std::map<std::size_t, Built> built;
  for (const auto &[tid, p] : by_target) {
    Built b{p.target->kind, p.target->text, p.target->parent, p.target->child_index};
    if (p.source) {
      const auto &sn = S[*p.source];
      if (sn.kind != p.target->kind)
        throw std::invalid_argument("matched nodes differ in kind");
      if (!p.updated)
        b.text = sn.text;
      if (!p.moved) {
        if (!sn.parent) {
          b.parent.reset();
        } else {
          auto it = image.find(*sn.parent);
          if (it == image.end())
            throw std::invalid_argument("aligned node whose source parent is unmatched");
          b.parent = it->second;
        }
      }
    }
    built.emplace(tid, std::move(b));
  }

  std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> kids;
  std::optional<std::size_t> root;
  for (const auto &[tid, b] : built) {
    if (!b.parent) {
      if (root)
        throw std::invalid_argument("script yields more than one root");
      root = tid;
    } else {
      kids[*b.parent].emplace_back(b.child_index, tid);
    }
  }
  if (!root)
    throw std::invalid_argument("script yields no root");

  std::size_t placed = 0;
  std::function<AstNode(std::size_t, int)> build = [&](std::size_t id, int depth) -> AstNode {
    if (depth > static_cast<int>(built.size()))
      throw std::invalid_argument("script yields a cycle");
    ++placed;
    const Built &b = built.at(id);
    AstNode n(b.kind, b.text);
    auto it = kids.find(id);
    if (it != kids.end()) {
      auto order = it->second;
      std::sort(order.begin(), order.end());
      for (const auto &[idx, child] : order)
        n.children.push_back(build(child, depth + 1));
    }
    return n;
  };
  AstNode out = build(*root, 0);
  if (placed != built.size())
    throw std::invalid_argument("script yields disconnected nodes");
  return out;
}

} // namespace astres::sql
