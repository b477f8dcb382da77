#include "rkopt/rooted_tree.hpp"

#include <algorithm>
#include <functional>

#include "rkopt/errors.hpp"

namespace rkopt {

RootedTree::RootedTree(std::vector<RootedTree> children) : children_(std::move(children)) {
  std::sort(children_.begin(), children_.end(), std::greater<>());
  for (const auto& child : children_) order_ += child.order_;
}

RootedTree RootedTree::chain(int n) {
  if (n < 1) throw DomainError("chain length must be >= 1");
  RootedTree tree;
  for (int i = 1; i < n; ++i) tree = RootedTree(std::vector<RootedTree>{tree});
  return tree;
}

int RootedTree::max_degree() const noexcept {
  int degree = static_cast<int>(children_.size());
  for (const auto& child : children_) degree = std::max(degree, child.max_degree());
  return degree;
}

std::string RootedTree::to_string() const {
  if (is_leaf()) return "•";
  std::string out = "[";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i) out += ',';
    out += children_[i].to_string();
  }
  out += ']';
  return out;
}

std::strong_ordering operator<=>(const RootedTree& lhs, const RootedTree& rhs) {
  if (auto cmp = lhs.order_ <=> rhs.order_; cmp != 0) return cmp;
  return std::lexicographical_compare_three_way(lhs.children_.begin(), lhs.children_.end(),
                                                rhs.children_.begin(), rhs.children_.end());
}

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  RootedTree parse() {
    RootedTree tree = parse_node();
    skip_spaces();
    if (pos_ != text_.size()) fail("trailing characters");
    return tree;
  }

 private:
  static constexpr std::string_view kBullet = "•";

  RootedTree parse_node() {
    skip_spaces();
    if (text_.substr(pos_, kBullet.size()) == kBullet) {
      pos_ += kBullet.size();
      return RootedTree::leaf();
    }
    if (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
      return RootedTree::leaf();
    }
    if (pos_ < text_.size() && text_[pos_] == '[') {
      ++pos_;
      std::vector<RootedTree> children;
      children.push_back(parse_node());
      skip_spaces();
      while (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        children.push_back(parse_node());
        skip_spaces();
      }
      if (pos_ >= text_.size() || text_[pos_] != ']') fail("expected ']'");
      ++pos_;
      return RootedTree(std::move(children));
    }
    fail("expected a leaf or '['");
  }

  void skip_spaces() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("tree", what + " at offset " + std::to_string(pos_) + " in \"" +
                                 std::string(text_) + "\"");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Appends every multiset of trees from pool[0..max_index] (non-increasing index)
// whose node counts sum to `remaining`.
void choose_children(const std::vector<RootedTree>& pool, int remaining, std::size_t max_index,
                     std::vector<RootedTree>& current, std::vector<RootedTree>& out) {
  if (remaining == 0) {
    out.emplace_back(current);
    return;
  }
  for (std::size_t i = max_index + 1; i-- > 0;) {
    if (pool[i].order() > remaining) continue;
    current.push_back(pool[i]);
    choose_children(pool, remaining - pool[i].order(), i, current, out);
    current.pop_back();
  }
}

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Runs of identical children, as (representative, multiplicity).
template <typename Fn>
void for_each_distinct_child(const RootedTree& tree, Fn&& fn) {
  const auto& children = tree.children();
  for (std::size_t i = 0; i < children.size();) {
    std::size_t j = i;
    while (j < children.size() && children[j] == children[i]) ++j;
    fn(children[i], static_cast<int>(j - i));
    i = j;
  }
}

}  // namespace

RootedTree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

std::vector<RootedTree> enumerate_trees(int q) {
  if (q < 1) throw DomainError("tree order must be >= 1");
  if (q > kMaxTreeOrder) {
    throw CapacityError("tree enumeration is capped at order " + std::to_string(kMaxTreeOrder) +
                        ", requested " + std::to_string(q));
  }
  // pool holds every tree of order < current, sorted ascending.
  std::vector<RootedTree> pool;
  std::vector<RootedTree> level{RootedTree::leaf()};
  for (int order = 2; order <= q; ++order) {
    pool.insert(pool.end(), level.begin(), level.end());
    level.clear();
    std::vector<RootedTree> current;
    choose_children(pool, order - 1, pool.size() - 1, current, level);
    std::sort(level.begin(), level.end());
  }
  return level;
}

std::int64_t tree_density(const RootedTree& tree) {
  std::int64_t gamma = tree.order();
  for (const auto& child : tree.children()) gamma *= tree_density(child);
  return gamma;
}

std::int64_t tree_symmetry(const RootedTree& tree) {
  std::int64_t sigma = 1;
  for_each_distinct_child(tree, [&](const RootedTree& child, int count) {
    std::int64_t s = tree_symmetry(child);
    for (int k = 0; k < count; ++k) sigma *= s;
    sigma *= factorial(count);
  });
  return sigma;
}

std::int64_t alpha(const RootedTree& tree) {
  std::int64_t result = factorial(tree.order() - 1);
  std::int64_t denominator = 1;
  for_each_distinct_child(tree, [&](const RootedTree& child, int count) {
    const std::int64_t a = alpha(child);
    const std::int64_t f = factorial(child.order());
    for (int k = 0; k < count; ++k) {
      result *= a;
      denominator *= f;
    }
    denominator *= factorial(count);
  });
  return result / denominator;
}

}  // namespace rkopt
