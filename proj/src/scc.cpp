#include "herring/scc.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

namespace herring {

std::vector<std::uint32_t> tarjan_components(const Adjacency& adj, std::uint32_t* count) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;  // vertex, next edge
  std::uint32_t next_index = 0, next_comp = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, ei] = call.back();
      if (ei < adj[v].size()) {
        std::uint32_t w = adj[v][ei++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = next_comp;
        } while (w != v);
        ++next_comp;
      }
      std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) {
        std::uint32_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

std::vector<std::vector<std::uint32_t>> tarjan_scc(const Adjacency& adj) {
  std::uint32_t k = 0;
  auto comp = tarjan_components(adj, &k);
  std::vector<std::vector<std::uint32_t>> members(k);
  for (std::uint32_t v = 0; v < adj.size(); ++v) members[comp[v]].push_back(v);

  // Kahn over the condensation, smallest member first.
  std::vector<std::vector<std::uint32_t>> succ(k);
  std::vector<std::uint32_t> indeg(k, 0);
  std::vector<std::uint32_t> seen_from(k, std::numeric_limits<std::uint32_t>::max());
  for (std::uint32_t c = 0; c < k; ++c)
    for (std::uint32_t v : members[c])
      for (std::uint32_t w : adj[v]) {
        std::uint32_t d = comp[w];
        if (d == c || seen_from[d] == c) continue;
        seen_from[d] = c;
        succ[c].push_back(d);
        ++indeg[d];
      }
  using Key = std::pair<std::uint32_t, std::uint32_t>;  // min member, component
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::uint32_t c = 0; c < k; ++c)
    if (indeg[c] == 0) ready.emplace(members[c].front(), c);

  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(k);
  while (!ready.empty()) {
    std::uint32_t c = ready.top().second;
    ready.pop();
    for (std::uint32_t d : succ[c])
      if (--indeg[d] == 0) ready.emplace(members[d].front(), d);
    out.push_back(std::move(members[c]));
  }
  return out;
}

}  // namespace herring
