#include <deque>
#include <limits>

#include "jitvd/ctg.hpp"

namespace jitvd {

CodeTransformationGraph trim_ctg(const CodeTransformationGraph& g, std::optional<int> hop_limit) {
  const std::size_t n = g.size();
  std::vector<NodeId> parent(n, kNoNode);
  std::vector<std::vector<NodeId>> children(n), dep_adj(n);
  for (const auto& e : g.edges) {
    if (e.relation.cls == RelationClass::Structure) {
      parent[static_cast<std::size_t>(e.dst)] = e.src;
      children[static_cast<std::size_t>(e.src)].push_back(e.dst);
    } else {
      dep_adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
      dep_adj[static_cast<std::size_t>(e.dst)].push_back(e.src);
    }
  }
  auto is_site = [&g](NodeId id) { return g[id].is_statement || g[id].is_predicate; };

  // hops[i] = fewest dependency hops from a seed; 0-1 BFS since the
  // descendant rule is free.
  constexpr int kUnreached = std::numeric_limits<int>::max();
  const int limit = hop_limit.value_or(kUnreached - 1);
  std::vector<int> hops(n, kUnreached);
  std::deque<NodeId> queue;
  auto reach = [&](NodeId id, int h, bool front) {
    if (h >= hops[static_cast<std::size_t>(id)]) return;
    hops[static_cast<std::size_t>(id)] = h;
    front ? queue.push_front(id) : queue.push_back(id);
  };

  for (const auto& node : g.nodes) {
    if (node.alpha == Alpha::Unchanged) continue;
    bool seeded = false;
    for (NodeId a = node.id; a != kNoNode; a = parent[static_cast<std::size_t>(a)]) {
      if (is_site(a)) {
        reach(a, 0, false);
        seeded = true;
      }
    }
    if (!seeded) reach(node.id, 0, false);
  }

  std::vector<bool> done(n, false);
  while (!queue.empty()) {
    NodeId id = queue.front();
    queue.pop_front();
    if (done[static_cast<std::size_t>(id)]) continue;
    done[static_cast<std::size_t>(id)] = true;
    const int h = hops[static_cast<std::size_t>(id)];
    for (NodeId c : children[static_cast<std::size_t>(id)]) reach(c, h, true);
    if (is_site(id) && h < limit) {
      for (NodeId d : dep_adj[static_cast<std::size_t>(id)])
        if (is_site(d)) reach(d, h + 1, false);
    }
  }

  std::vector<bool> keep(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (hops[i] == kUnreached) continue;
    for (NodeId a = static_cast<NodeId>(i); a != kNoNode && !keep[static_cast<std::size_t>(a)];
         a = parent[static_cast<std::size_t>(a)])
      keep[static_cast<std::size_t>(a)] = true;
  }

  CodeTransformationGraph out;
  std::vector<NodeId> remap(n, kNoNode);
  for (const auto& node : g.nodes) {
    if (!keep[static_cast<std::size_t>(node.id)]) continue;
    remap[static_cast<std::size_t>(node.id)] = static_cast<NodeId>(out.nodes.size());
    out.nodes.push_back(node);
    out.nodes.back().id = remap[static_cast<std::size_t>(node.id)];
  }
  for (const auto& e : g.edges) {
    NodeId s = remap[static_cast<std::size_t>(e.src)], d = remap[static_cast<std::size_t>(e.dst)];
    if (s != kNoNode && d != kNoNode) out.edges.push_back({s, d, e.relation, e.alpha});
  }
  return out;
}

}  // namespace jitvd
