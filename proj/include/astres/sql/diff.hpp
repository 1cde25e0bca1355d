#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "astres/sql/ast.hpp"

namespace astres::sql {

/// A node addressed by its pre-order position in its tree.
struct NodeRef {
  std::size_t id = 0;
  std::optional<std::size_t> parent;
  std::size_t child_index = 0;
  NodeKind kind = NodeKind::Literal;
  std::string text;

  friend bool operator==(const NodeRef &, const NodeRef &) = default;
};

enum class EditKind { Insert, Delete, Update, Move, Alignment };

std::string_view to_string(EditKind kind) noexcept;

/// Insert carries only `target`, Delete only `source`; the others carry the
/// matched pair.
struct EditOp {
  EditKind kind = EditKind::Alignment;
  std::optional<NodeRef> source;
  std::optional<NodeRef> target;
};

struct EditScript {
  std::vector<EditOp> ops;
  std::size_t target_size = 0; // node count of the target tree

  std::size_t count(EditKind kind) const noexcept;
};

struct AstSimilarity {
  double score = 0.0;
  std::size_t n_alignments = 0;
  std::size_t n_total_ops = 0;
};

/// Pre-order flattening of a normalized tree with the per-node data the
/// matcher needs. Building one is the expensive part of a diff, so callers
/// comparing one tree against many should prepare it once.
class PreparedTree {
public:
  explicit PreparedTree(const NormalizedAst &ast);

  struct Node {
    NodeKind kind;
    std::string text;
    std::optional<std::size_t> parent;
    std::size_t child_index;
    std::size_t end; // one past the last descendant in pre-order
    std::vector<std::uint16_t> text_bigrams;
    std::vector<std::uint16_t> subtree_bigrams;
    std::string subtree_text;
  };

  NormMode mode() const noexcept { return mode_; }
  const std::vector<Node> &nodes() const noexcept { return nodes_; }
  NodeRef ref(std::size_t id) const;

private:
  NormMode mode_;
  std::vector<Node> nodes_;
};

/// Bigram Dice coefficient. Strings shorter than two bytes score 1 when
/// equal and 0 otherwise.
double dice(std::string_view a, std::string_view b);

/// Change Distilling edit script from `source` to `target`.
/// Throws ModeMismatch when the trees were normalized in different modes.
EditScript diff(const NormalizedAst &source, const NormalizedAst &target);
EditScript diff(const PreparedTree &source, const PreparedTree &target);

/// Ratio of alignments to all edit operations.
AstSimilarity similarity(const NormalizedAst &source, const NormalizedAst &target);
AstSimilarity similarity(const PreparedTree &source, const PreparedTree &target);

/// Rebuilds the target tree from `source` and the script. Aligned and
/// updated nodes are re-parented under the image of their source parent, so
/// a wrong alignment produces a wrong tree. Throws std::invalid_argument on
/// a script that does not cover every node exactly once.
AstNode apply_script(const AstNode &source, const EditScript &script);

} // namespace astres::sql
