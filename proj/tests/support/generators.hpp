#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "abe/tree/access_tree.hpp"

namespace abe::gen {

// Random threshold tree over attributes "a0".."a<pool-1>" with at most
// max_leaves leaves and the given depth bound.
inline tree::AccessTree random_tree(std::mt19937_64& rng, int depth, std::size_t max_leaves, std::size_t pool) {
  auto attr = [&] { return "a" + std::to_string(rng() % pool); };
  std::function<tree::AccessTree(int, std::size_t)> build = [&](int d, std::size_t budget) -> tree::AccessTree {
    if (d <= 0 || budget < 2 || rng() % 4 == 0) return tree::AccessTree::leaf(attr());
    std::size_t n = std::min<std::size_t>(2 + rng() % 3, budget);
    std::vector<std::size_t> share(n, 1);
    for (std::size_t extra = budget - n; extra > 0; --extra) ++share[rng() % n];
    std::vector<tree::AccessTree> kids;
    for (std::size_t i = 0; i < n; ++i) kids.push_back(build(d - 1, share[i]));
    auto k = static_cast<std::uint32_t>(1 + rng() % n);
    return tree::AccessTree::threshold(k, std::move(kids));
  };
  return build(depth, max_leaves);
}

// Plain boolean evaluation, independent of the witness search.
inline bool evaluate(const tree::AccessTree& t, const std::set<std::string>& attrs, std::uint32_t id = 0) {
  const auto& n = t.node(id);
  if (n.kind == tree::AccessTree::Kind::Leaf) return attrs.count(n.attr) != 0;
  std::uint32_t ok = 0;
  for (auto c : n.children) ok += evaluate(t, attrs, c) ? 1 : 0;
  return ok >= n.k;
}

// Same evaluation with the leaf set restricted to a subset of leaf ids.
inline bool evaluate_leaves(const tree::AccessTree& t, const std::set<std::uint32_t>& on, std::uint32_t id = 0) {
  const auto& n = t.node(id);
  if (n.kind == tree::AccessTree::Kind::Leaf) return on.count(id) != 0;
  std::uint32_t ok = 0;
  for (auto c : n.children) ok += evaluate_leaves(t, on, c) ? 1 : 0;
  return ok >= n.k;
}

inline std::set<std::string> random_attrs(std::mt19937_64& rng, std::size_t pool, double p) {
  std::set<std::string> out;
  std::bernoulli_distribution coin(p);
  for (std::size_t i = 0; i < pool; ++i) {
    if (coin(rng)) out.insert("a" + std::to_string(i));
  }
  return out;
}

}  // namespace abe::gen
