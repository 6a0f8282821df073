#include <deque>

#include "jitvd/graphs.hpp"

namespace jitvd {
namespace {

class FlowBuilder {
 public:
  explicit FlowBuilder(std::span<const AstNode> nodes) : nodes_(nodes) {
    g_.site = {kNoNode, kNoNode};
    g_.succ.resize(2);
  }

  const AstNode& at(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  int add_site(NodeId id, const std::vector<int>& from) {
    int slot = static_cast<int>(g_.site.size());
    g_.site.push_back(id);
    g_.succ.emplace_back();
    link(from, slot);
    return slot;
  }

  void link(const std::vector<int>& from, int to) {
    for (int f : from) g_.succ[static_cast<std::size_t>(f)].push_back(to);
  }

  // Returns the slots that fall through to whatever follows `id`.
  std::vector<int> stmt(NodeId id, std::vector<int> in) {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::Block:
        for (NodeId c : n.children) in = stmt(c, std::move(in));
        return in;
      case NodeKind::ReturnStmt: {
        int s = add_site(id, in);
        link({s}, FlowGraph::kExit);
        return {};
      }
      case NodeKind::IfStmt: {
        int p = add_site(n.children[0], in);
        auto out = stmt(n.children[1], {p});
        if (n.children.size() > 2) {
          auto other = stmt(n.children[2], {p});
          out.insert(out.end(), other.begin(), other.end());
        } else {
          out.push_back(p);
        }
        return out;
      }
      case NodeKind::WhileStmt: {
        int p = add_site(n.children[0], in);
        auto body = stmt(n.children[1], {p});
        link(body, p);
        return {p};
      }
      default:
        return {add_site(id, in)};
    }
  }

  FlowGraph build(NodeId func) {
    const auto& f = at(func);
    std::vector<int> cur = {FlowGraph::kEntry};
    for (NodeId c : f.children) {
      if (at(c).kind == NodeKind::Param) {
        cur = {add_site(c, cur)};
      } else {
        cur = stmt(c, std::move(cur));
      }
    }
    link(cur, FlowGraph::kExit);
    g_.pred.assign(g_.succ.size(), {});
    for (std::size_t s = 0; s < g_.succ.size(); ++s)
      for (int t : g_.succ[s]) g_.pred[static_cast<std::size_t>(t)].push_back(static_cast<int>(s));
    return std::move(g_);
  }

 private:
  std::span<const AstNode> nodes_;
  FlowGraph g_;
};

void control_walk(const Ast& ast, NodeId id, NodeId pred, std::set<std::pair<NodeId, NodeId>>& out) {
  const auto& n = ast[id];
  if (n.kind == NodeKind::Block) {
    for (NodeId c : n.children) control_walk(ast, c, pred, out);
    return;
  }
  if (n.is_statement && pred != kNoNode) out.emplace(pred, id);
  if (n.kind == NodeKind::IfStmt || n.kind == NodeKind::WhileStmt) {
    for (std::size_t i = 1; i < n.children.size(); ++i) control_walk(ast, n.children[i], n.children[0], out);
  }
}

}  // namespace

FlowGraph build_flow_graph(std::span<const AstNode> nodes, NodeId func) {
  return FlowBuilder(nodes).build(func);
}

ReachingDefs reaching_definitions(const Ast& ast, NodeId func, const DefUseConfig& cfg) {
  const FlowGraph g = build_flow_graph(ast.nodes, func);
  const std::size_t n = g.site.size();

  // Number every (site, var) definition; sets are dense bit vectors over them.
  struct DefRef {
    NodeId site;
    std::string var;
  };
  std::vector<DefRef> all_defs;
  std::vector<SiteDefUse> du(n);
  std::vector<std::vector<std::size_t>> gen(n);
  for (std::size_t s = 2; s < n; ++s) {
    du[s] = def_use(ast.nodes, g.site[s], cfg);
    for (const auto& d : du[s].defs) {
      gen[s].push_back(all_defs.size());
      all_defs.push_back({g.site[s], d.var});
    }
  }
  const std::size_t m = all_defs.size();
  using Bits = std::vector<bool>;
  std::vector<Bits> kill(n, Bits(m, false));
  for (std::size_t s = 2; s < n; ++s) {
    for (const auto& d : du[s].defs) {
      if (!d.strong) continue;
      for (std::size_t k = 0; k < m; ++k)
        if (all_defs[k].var == d.var && all_defs[k].site != g.site[s]) kill[s][k] = true;
    }
  }

  std::vector<Bits> in(n, Bits(m, false)), out(n, Bits(m, false));
  std::deque<std::size_t> work;
  std::vector<bool> queued(n, true);
  for (std::size_t s = 0; s < n; ++s) work.push_back(s);
  while (!work.empty()) {
    std::size_t s = work.front();
    work.pop_front();
    queued[s] = false;
    Bits next_in(m, false);
    for (int p : g.pred[s])
      for (std::size_t k = 0; k < m; ++k)
        if (out[static_cast<std::size_t>(p)][k]) next_in[k] = true;
    Bits next_out(m, false);
    for (std::size_t k = 0; k < m; ++k) next_out[k] = next_in[k] && !kill[s][k];
    for (std::size_t k : gen[s]) next_out[k] = true;
    in[s] = std::move(next_in);
    if (next_out != out[s]) {
      out[s] = std::move(next_out);
      for (int t : g.succ[s]) {
        if (!queued[static_cast<std::size_t>(t)]) {
          queued[static_cast<std::size_t>(t)] = true;
          work.push_back(static_cast<std::size_t>(t));
        }
      }
    }
  }

  ReachingDefs result;
  for (std::size_t s = 2; s < n; ++s) {
    for (const auto& v : du[s].uses) {
      auto& defs = result[{g.site[s], v}];
      for (std::size_t k = 0; k < m; ++k)
        if (in[s][k] && all_defs[k].var == v) defs.insert(all_defs[k].site);
    }
  }
  return result;
}

std::set<std::pair<NodeId, NodeId>> control_dependence(const Ast& ast, NodeId func) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (NodeId c : ast[func].children) control_walk(ast, c, kNoNode, out);
  return out;
}

}  // namespace jitvd
