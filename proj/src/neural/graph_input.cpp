#include "jitvd/neural/graph_input.hpp"

#include <algorithm>

namespace jitvd::neural {

int RelGraph::find_edge(int r, int j, int i) const {
  const auto ru = static_cast<std::size_t>(r);
  for (int e = offsets[ru][static_cast<std::size_t>(i)]; e < offsets[ru][static_cast<std::size_t>(i) + 1]; ++e)
    if (src[ru][static_cast<std::size_t>(e)] == j) return e;
  return -1;
}

RelGraph make_rel_graph(int num_nodes, std::span<const EdgeTriple> edges, Direction dir) {
  RelGraph g;
  g.num_nodes = num_nodes;
  std::array<std::vector<std::pair<int, int>>, kNumRelations> by_rel;  // (dst, src)
  for (const auto& [s, d, r] : edges) {
    if (s < 0 || d < 0 || s >= num_nodes || d >= num_nodes || r < 0 || r >= kNumRelations)
      throw ShapeMismatch("edge out of range");
    by_rel[static_cast<std::size_t>(r)].emplace_back(d, s);
    if (dir == Direction::Bidirectional) by_rel[static_cast<std::size_t>(r)].emplace_back(s, d);
  }
  for (std::size_t r = 0; r < by_rel.size(); ++r) {
    auto& list = by_rel[r];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.offsets[r].assign(static_cast<std::size_t>(num_nodes) + 1, 0);
    for (const auto& [d, s] : list) {
      ++g.offsets[r][static_cast<std::size_t>(d) + 1];
      g.src[r].push_back(s);
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(num_nodes); ++i) g.offsets[r][i + 1] += g.offsets[r][i];
  }
  return g;
}

GraphSample encode_ctg(const CodeTransformationGraph& g, const Vocab& vocab, Direction dir) {
  GraphSample s;
  std::vector<EdgeTriple> edges;
  edges.reserve(g.edges.size());
  for (const auto& e : g.edges) edges.emplace_back(e.src, e.dst, static_cast<int>(e.relation.cls));
  s.graph = make_rel_graph(static_cast<int>(g.size()), edges, dir);
  for (const auto& n : g.nodes) {
    AstNode view;
    view.kind = n.kind;
    view.label = n.label;
    s.tokens.push_back(vocab.index(content_token(view)));
    s.alpha.push_back(static_cast<int>(n.alpha));
  }
  return s;
}

TokenStream content_stream(const CodeTransformationGraph& g) {
  TokenStream out;
  out.reserve(g.size());
  for (const auto& n : g.nodes) {
    AstNode view;
    view.kind = n.kind;
    view.label = n.label;
    out.push_back(content_token(view));
  }
  return out;
}

}  // namespace jitvd::neural
