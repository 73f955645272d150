#pragma once

// Iterative post-order evaluation over an implicit DAG with memoization.
// Recursion is avoided because move budgets allow lines far deeper than the
// native stack.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cumulant/errors.hpp"

namespace cumulant::detail {

enum class AbortReason { cycle, depth, nodes };

template <class Key, class Edge>
struct Frame {
  Key key;
  std::vector<Edge> edges;
  std::size_t next = 0;
};

struct SearchLimits {
  std::uint64_t depth = UINT64_MAX;
  std::uint64_t nodes = UINT64_MAX;
};

inline void default_abort(AbortReason reason, std::uint64_t limit) {
  switch (reason) {
    case AbortReason::cycle:
      throw CycleError("position repeats along a line of play");
    case AbortReason::depth:
      throw BudgetExceeded("line of play exceeds move budget " + std::to_string(limit));
    case AbortReason::nodes:
      throw BudgetExceeded("position count exceeds node budget " + std::to_string(limit));
  }
}

// succ(key) -> std::vector<Edge>
// key_of(edge) -> Key (or const Key&)
// combine(key, edges, std::vector<const Value*> children) -> Value
// on_abort(reason, frames) must throw.
template <class Key, class Hash, class Value, class Succ, class KeyOf, class Combine,
          class OnAbort>
const Value& memo_dfs(const Key& root, std::unordered_map<Key, Value, Hash>& memo,
                      SearchLimits limits, Succ&& succ, KeyOf&& key_of, Combine&& combine,
                      OnAbort&& on_abort) {
  if (auto it = memo.find(root); it != memo.end()) return it->second;
  using Edge = typename decltype(succ(root))::value_type;
  std::vector<Frame<Key, Edge>> stack;
  std::unordered_set<Key, Hash> on_stack;
  stack.push_back({root, succ(root), 0});
  on_stack.insert(root);

  std::vector<const Value*> children;
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.next < top.edges.size()) {
      const Key& child = key_of(top.edges[top.next]);
      if (memo.count(child)) {
        ++top.next;
        continue;
      }
      if (on_stack.count(child)) on_abort(AbortReason::cycle, stack);
      if (stack.size() > limits.depth) on_abort(AbortReason::depth, stack);
      if (memo.size() + stack.size() >= limits.nodes) on_abort(AbortReason::nodes, stack);
      Key copy = child;
      auto edges = succ(copy);
      on_stack.insert(copy);
      stack.push_back({std::move(copy), std::move(edges), 0});
      continue;
    }
    children.clear();
    for (const auto& e : top.edges) children.push_back(&memo.at(key_of(e)));
    Value v = combine(top.key, top.edges, children);
    on_stack.erase(top.key);
    auto [it, inserted] = memo.emplace(std::move(top.key), std::move(v));
    (void)it;
    (void)inserted;
    stack.pop_back();
  }
  return memo.at(root);
}

template <class Key, class Hash, class Value, class Succ, class KeyOf, class Combine>
const Value& memo_dfs(const Key& root, std::unordered_map<Key, Value, Hash>& memo,
                      SearchLimits limits, Succ&& succ, KeyOf&& key_of, Combine&& combine) {
  return memo_dfs(root, memo, limits, std::forward<Succ>(succ), std::forward<KeyOf>(key_of),
                  std::forward<Combine>(combine), [&](AbortReason r, const auto&) {
                    default_abort(r, r == AbortReason::nodes ? limits.nodes : limits.depth);
                  });
}

}  // namespace cumulant::detail
