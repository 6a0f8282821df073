#pragma once

#include <optional>
#include <span>
#include <vector>

#include "jitvd/graphs.hpp"

namespace jitvd {

enum class Alpha { Unchanged = 0, Added = 1, Deleted = 2 };

std::string_view alpha_name(Alpha a);

/// Node identity across the two versions of a change.
struct NodeMatching {
  std::vector<std::pair<NodeId, NodeId>> pairs;  // (old, new), sorted by old id
  std::vector<NodeId> unmatched_old;
  std::vector<NodeId> unmatched_new;
};

/// Two-phase matching. Functions pair by name; statements in each block align
/// by LCS over canonical statement text, and leftover same-kind statements at
/// equal positions between anchors pair as well. Inside a paired node the
/// children pair greedily by (kind, label, type), same index first.
NodeMatching match_versions(const RelationalCodeGraph& g_old, const RelationalCodeGraph& g_new);

struct CtgNode {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::TranslationUnit;
  std::string label;
  std::string type;
  int line_old = 0;  // 0 when the node has no old counterpart
  int line_new = 0;
  bool is_statement = false;
  bool is_predicate = false;
  Alpha alpha = Alpha::Unchanged;
  NodeId old_id = kNoNode;
  NodeId new_id = kNoNode;
};

struct CtgEdge {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  Relation relation;
  Alpha alpha = Alpha::Unchanged;
};

struct CodeTransformationGraph {
  std::vector<CtgNode> nodes;
  std::vector<CtgEdge> edges;  // sorted by (src, dst, relation)

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
  const CtgNode& operator[](NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
};

/// Merges the two graphs through `m`. Throws MatchingInvalid when `m` is not
/// a partial bijection covering both node sets.
CodeTransformationGraph build_ctg(const RelationalCodeGraph& g_old, const RelationalCodeGraph& g_new,
                                  const NodeMatching& m);

/// Keeps the nodes relevant to the change:
///  - statements/predicates that are structure ancestors of changed nodes
///    (a changed node with no such ancestor seeds itself),
///  - statements/predicates dependency-connected to relevant nodes, at most
///    `hop_limit` dependency hops away when given,
///  - structure descendants of relevant nodes,
/// plus the structure ancestors of everything kept.
CodeTransformationGraph trim_ctg(const CodeTransformationGraph& g, std::optional<int> hop_limit = {});

/// Fraction of nodes whose annotation is not unchanged; 0 for an empty graph.
double change_rate(const CodeTransformationGraph& g);

/// Concatenates graphs, offsetting ids. Used for multi-file commits.
CodeTransformationGraph disjoint_union(std::span<const CodeTransformationGraph> parts);

nlohmann::json ctg_to_json(const CodeTransformationGraph& g);
CodeTransformationGraph ctg_from_json(const nlohmann::json& j);
std::string ctg_to_dot(const CodeTransformationGraph& g);

}  // namespace jitvd
