#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rkopt {

/// Unlabelled rooted tree indexing an elementary differential.
///
/// Children are kept in canonical form: sorted in descending canonical order,
/// where trees compare first by node count and then lexicographically by their
/// (canonical) child lists. Two trees are equal iff they are isomorphic.
class RootedTree {
 public:
  /// The single-node tree.
  RootedTree() = default;

  /// [children...]; the children are canonicalised.
  explicit RootedTree(std::vector<RootedTree> children);

  static RootedTree leaf() { return RootedTree(); }
  /// Chain of n nodes: leaf for n == 1, [chain(n-1)] otherwise.
  static RootedTree chain(int n);

  const std::vector<RootedTree>& children() const noexcept { return children_; }
  int order() const noexcept { return order_; }
  bool is_leaf() const noexcept { return children_.empty(); }
  /// Largest out-degree over all nodes.
  int max_degree() const noexcept;

  /// Bracket notation: "•" for the leaf, "[c1,c2,...]" otherwise.
  std::string to_string() const;

  friend std::strong_ordering operator<=>(const RootedTree& lhs, const RootedTree& rhs);
  friend bool operator==(const RootedTree& lhs, const RootedTree& rhs) {
    return (lhs <=> rhs) == std::strong_ordering::equal;
  }

 private:
  std::vector<RootedTree> children_;
  int order_ = 1;
};

/// Parses bracket notation. Accepts "•" or "*" for a leaf. Throws ParseError.
RootedTree parse_tree(std::string_view text);

inline constexpr int kMaxTreeOrder = 8;

/// All non-isomorphic rooted trees with q nodes, canonical and sorted ascending.
/// Throws DomainError for q < 1 and CapacityError for q > kMaxTreeOrder.
std::vector<RootedTree> enumerate_trees(int q);

/// gamma(tree) = |tree| * prod gamma(child).
std::int64_t tree_density(const RootedTree& tree);

/// Size of the automorphism group.
std::int64_t tree_symmetry(const RootedTree& tree);

/// Multiplicity of the tree in the q-th derivative of the exact flow
/// (number of monotone labellings), computed recursively as
///   alpha([t1^k1 ... tm^km]) = (|t|-1)! / prod(|ti|!^ki * ki!) * prod alpha(ti)^ki.
std::int64_t alpha(const RootedTree& tree);

}  // namespace rkopt
