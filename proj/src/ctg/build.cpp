#include <algorithm>
#include <set>
#include <tuple>

#include "jitvd/ctg.hpp"

namespace jitvd {

std::string_view alpha_name(Alpha a) {
  switch (a) {
    case Alpha::Unchanged: return "unchanged";
    case Alpha::Added: return "added";
    case Alpha::Deleted: return "deleted";
  }
  return "?";
}

namespace {

void validate(const RelationalCodeGraph& g_old, const RelationalCodeGraph& g_new, const NodeMatching& m) {
  std::vector<int> seen_old(g_old.size(), 0), seen_new(g_new.size(), 0);
  auto mark = [](std::vector<int>& seen, NodeId id, const char* side) {
    if (id < 0 || static_cast<std::size_t>(id) >= seen.size())
      throw MatchingInvalid(std::string("unknown ") + side + " node id " + std::to_string(id));
    if (seen[static_cast<std::size_t>(id)]++)
      throw MatchingInvalid(std::string(side) + " node " + std::to_string(id) + " listed twice");
  };
  for (const auto& [o, n] : m.pairs) {
    mark(seen_old, o, "old");
    mark(seen_new, n, "new");
    if (g_old[o].kind != g_new[n].kind)
      throw MatchingInvalid("pair (" + std::to_string(o) + ", " + std::to_string(n) + ") has different kinds");
  }
  for (NodeId o : m.unmatched_old) mark(seen_old, o, "old");
  for (NodeId n : m.unmatched_new) mark(seen_new, n, "new");
  for (int s : seen_old)
    if (s == 0) throw MatchingInvalid("matching does not cover every old node");
  for (int s : seen_new)
    if (s == 0) throw MatchingInvalid("matching does not cover every new node");
}

CtgNode from_node(const AstNode& n, Alpha alpha) {
  CtgNode c;
  c.kind = n.kind;
  c.label = n.label;
  c.type = n.type;
  c.is_statement = n.is_statement;
  c.is_predicate = n.is_predicate;
  c.alpha = alpha;
  return c;
}

}  // namespace

CodeTransformationGraph build_ctg(const RelationalCodeGraph& g_old, const RelationalCodeGraph& g_new,
                                  const NodeMatching& m) {
  validate(g_old, g_new, m);

  std::vector<NodeId> new_to_old(g_new.size(), kNoNode);
  for (const auto& [o, n] : m.pairs) new_to_old[static_cast<std::size_t>(n)] = o;

  CodeTransformationGraph g;
  std::vector<NodeId> old_map(g_old.size(), kNoNode), new_map(g_new.size(), kNoNode);
  auto push = [&g](CtgNode node) {
    node.id = static_cast<NodeId>(g.nodes.size());
    g.nodes.push_back(std::move(node));
    return g.nodes.back().id;
  };

  // Unchanged and added nodes in new pre-order, then deleted nodes in old order.
  for (const auto& n : g_new.nodes) {
    NodeId o = new_to_old[static_cast<std::size_t>(n.id)];
    CtgNode c = from_node(n, o == kNoNode ? Alpha::Added : Alpha::Unchanged);
    c.line_new = n.line;
    c.new_id = n.id;
    if (o != kNoNode) {
      c.line_old = g_old[o].line;
      c.old_id = o;
    }
    NodeId id = push(std::move(c));
    new_map[static_cast<std::size_t>(n.id)] = id;
    if (o != kNoNode) old_map[static_cast<std::size_t>(o)] = id;
  }
  for (NodeId o : m.unmatched_old) {
    CtgNode c = from_node(g_old[o], Alpha::Deleted);
    c.line_old = g_old[o].line;
    c.old_id = o;
    old_map[static_cast<std::size_t>(o)] = push(std::move(c));
  }

  using Key = std::tuple<NodeId, NodeId, Relation>;
  std::set<Key> in_old, in_new;
  for (const auto& e : g_old.edges)
    in_old.emplace(old_map[static_cast<std::size_t>(e.src)], old_map[static_cast<std::size_t>(e.dst)], e.relation);
  for (const auto& e : g_new.edges)
    in_new.emplace(new_map[static_cast<std::size_t>(e.src)], new_map[static_cast<std::size_t>(e.dst)], e.relation);

  std::set<Key> all = in_old;
  all.insert(in_new.begin(), in_new.end());
  for (const auto& [src, dst, rel] : all) {
    const bool o = in_old.count({src, dst, rel}) > 0;
    const bool n = in_new.count({src, dst, rel}) > 0;
    g.edges.push_back({src, dst, rel, o && n ? Alpha::Unchanged : (n ? Alpha::Added : Alpha::Deleted)});
  }
  return g;
}

double change_rate(const CodeTransformationGraph& g) {
  if (g.nodes.empty()) return 0.0;
  auto changed = std::count_if(g.nodes.begin(), g.nodes.end(),
                               [](const CtgNode& n) { return n.alpha != Alpha::Unchanged; });
  return static_cast<double>(changed) / static_cast<double>(g.nodes.size());
}

CodeTransformationGraph disjoint_union(std::span<const CodeTransformationGraph> parts) {
  CodeTransformationGraph out;
  for (const auto& p : parts) {
    const auto offset = static_cast<NodeId>(out.nodes.size());
    for (auto n : p.nodes) {
      n.id += offset;
      out.nodes.push_back(std::move(n));
    }
    for (auto e : p.edges) {
      e.src += offset;
      e.dst += offset;
      out.edges.push_back(e);
    }
  }
  return out;
}

}  // namespace jitvd
