#pragma once

#include <array>
#include <istream>
#include <memory>
#include <vector>

#include "finadv/variables.hpp"

namespace finadv {

/// `child` contributes `sign * child` to `parent`.
struct DependencyEdge {
  Var parent;
  Var child;
  int sign;  // +1 value-added, -1 subtracted

  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

/// Signed path from an atom to one of its ancestors.
struct AncestorLink {
  Var ancestor;
  int sign;  // product of edge signs along the path
};

/// Variable-dependency forest. Leaves among the reported variables are atoms;
/// everything with children is derived.
class Hierarchy {
 public:
  /// Throws HierarchyError if the edges do not form a forest.
  explicit Hierarchy(std::vector<DependencyEdge> edges);

  /// The tree drawn for 10-K balancing with the PI/XOPR chain collapsed into
  /// a single subtracted edge under NI.
  static std::shared_ptr<const Hierarchy> standard();

  const std::vector<DependencyEdge>& edges() const noexcept { return edges_; }
  bool is_atom(Var v) const noexcept { return atom_[index(v)]; }
  bool is_parent(Var v) const noexcept { return !children_[index(v)].empty(); }
  const std::vector<DependencyEdge>& children(Var parent) const noexcept {
    return children_[index(parent)];
  }
  const std::vector<AncestorLink>& ancestors(Var v) const noexcept {
    return ancestors_[index(v)];
  }
  /// Parents ordered so that every parent appears after all its derived children.
  const std::vector<Var>& bottom_up_parents() const noexcept { return bottom_up_; }

  std::vector<Var> atoms() const;

 private:
  std::vector<DependencyEdge> edges_;
  std::array<std::vector<DependencyEdge>, kNumNodes> children_;
  std::array<std::vector<AncestorLink>, kNumNodes> ancestors_;
  std::array<bool, kNumNodes> atom_{};
  std::vector<Var> bottom_up_;
};

/// Reads `parent,child,sign` lines; `#` starts a comment.
std::vector<DependencyEdge> parse_edge_catalog(std::istream& in);

}  // namespace finadv
