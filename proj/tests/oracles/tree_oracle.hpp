#pragma once

// Brute-force tree quantities computed from labeled recursive trees
// (node 0 is the root, parent[i] < i). Used to cross-check the library.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rkopt/rooted_tree.hpp"
#include "rkopt/tableau.hpp"

namespace oracle {

using ParentArray = std::vector<int>;  // parent[0] = -1

inline std::string canonical(const ParentArray& parent, int node) {
  std::vector<std::string> kids;
  for (int i = 0; i < static_cast<int>(parent.size()); ++i) {
    if (parent[i] == node) kids.push_back(canonical(parent, i));
  }
  std::sort(kids.begin(), kids.end());
  std::string out = "(";
  for (const auto& k : kids) out += k;
  return out + ")";
}

inline std::string canonical(const ParentArray& parent) { return canonical(parent, 0); }

/// Every labeled recursive tree on q nodes; (q-1)! of them.
inline std::vector<ParentArray> labeled_trees(int q) {
  std::vector<ParentArray> out;
  ParentArray parent(q, -1);
  std::function<void(int)> rec = [&](int i) {
    if (i == q) {
      out.push_back(parent);
      return;
    }
    for (int p = 0; p < i; ++p) {
      parent[i] = p;
      rec(i + 1);
    }
  };
  rec(1);
  return out;
}

/// Canonical shape -> number of increasing labelings.
inline std::map<std::string, std::int64_t> shapes(int q) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& p : labeled_trees(q)) ++counts[canonical(p)];
  return counts;
}

inline void flatten(const rkopt::RootedTree& t, int parent, ParentArray& out) {
  const int me = static_cast<int>(out.size());
  out.push_back(parent);
  for (const auto& c : t.children()) flatten(c, me, out);
}

inline ParentArray to_parents(const rkopt::RootedTree& t) {
  ParentArray out;
  flatten(t, -1, out);
  return out;
}

inline std::string canonical(const rkopt::RootedTree& t) { return canonical(to_parents(t)); }

/// Product over nodes of the subtree size.
inline std::int64_t density(const ParentArray& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<std::int64_t> size(n, 1);
  for (int i = n - 1; i > 0; --i) size[parent[i]] += size[i];
  std::int64_t g = 1;
  for (auto s : size) g *= s;
  return g;
}

/// Sum over all stage assignments of b_root * prod over edges a(parent stage, child stage).
inline double weight(const rkopt::ButcherTableau& tab, const ParentArray& parent) {
  const int n = static_cast<int>(parent.size());
  const int S = tab.stages();
  std::vector<int> stage(n, 0);
  double total = 0.0;
  while (true) {
    double term = tab.b()[stage[0]];
    for (int i = 1; i < n && term != 0.0; ++i) term *= tab.a(stage[parent[i]], stage[i]);
    total += term;
    int k = 0;
    while (k < n && ++stage[k] == S) stage[k++] = 0;
    if (k == n) break;
  }
  return total;
}

}  // namespace oracle
