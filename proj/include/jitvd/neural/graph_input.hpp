#pragma once

#include <array>
#include <span>
#include <tuple>
#include <vector>

#include "jitvd/ctg.hpp"
#include "jitvd/neural/vocab.hpp"

namespace jitvd::neural {

enum class Direction { Forward, Bidirectional };

/// Relational graph in compressed in-neighbor form. For relation r the
/// in-edges of node i are positions [offsets[r][i], offsets[r][i+1]) of
/// src[r]; each (src, dst, r) appears once.
struct RelGraph {
  int num_nodes = 0;
  std::array<std::vector<int>, kNumRelations> offsets;
  std::array<std::vector<int>, kNumRelations> src;

  int in_degree(int r, int i) const {
    return offsets[static_cast<std::size_t>(r)][static_cast<std::size_t>(i) + 1] -
           offsets[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)];
  }
  int num_edges(int r) const { return static_cast<int>(src[static_cast<std::size_t>(r)].size()); }

  /// Position of edge (j -> i) under r, or -1.
  int find_edge(int r, int j, int i) const;
};

/// (src, dst, relation-class index) triples.
using EdgeTriple = std::tuple<int, int, int>;

/// Builds the CSR form. Duplicates collapse; bidirectional mode adds every
/// reversed edge under the same relation.
RelGraph make_rel_graph(int num_nodes, std::span<const EdgeTriple> edges, Direction dir);

/// Model input derived from a CTG.
struct GraphSample {
  RelGraph graph;
  std::vector<int> tokens;  // vocabulary index of each node's content token
  std::vector<int> alpha;   // 0 unchanged, 1 added, 2 deleted
};

GraphSample encode_ctg(const CodeTransformationGraph& g, const Vocab& vocab, Direction dir);

/// Node content tokens of a graph in id order (vocabulary/pretraining input).
TokenStream content_stream(const CodeTransformationGraph& g);

}  // namespace jitvd::neural
