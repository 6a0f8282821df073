#include <algorithm>

#include "jitvd/graphs.hpp"

namespace jitvd {
namespace {

class DefUseWalker {
 public:
  DefUseWalker(std::span<const AstNode> nodes, const DefUseConfig& cfg, SiteDefUse& out)
      : nodes_(nodes), cfg_(cfg), out_(out) {}

  const AstNode& at(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  // Variable named by an lvalue-like expression, if any.
  std::string base_var(NodeId id) const {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::Identifier:
      case NodeKind::MemberAccess:
        return n.label;
      case NodeKind::Index:
        return base_var(n.children[0]);
      case NodeKind::UnaryOp:
        return (n.label == "&" || n.label == "*") ? base_var(n.children[0]) : std::string{};
      default:
        return {};
    }
  }

  void weak_def(NodeId id) {
    auto v = base_var(id);
    if (!v.empty()) add_def({v, false});
  }

  void add_def(Definition d) {
    if (std::find(out_.defs.begin(), out_.defs.end(), d) == out_.defs.end()) out_.defs.push_back(std::move(d));
  }

  void uses(NodeId id) {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::Identifier:
      case NodeKind::MemberAccess:
        out_.uses.insert(n.label);
        return;
      case NodeKind::UnaryOp:
        if (n.label == "&") weak_def(n.children[0]);
        break;
      case NodeKind::Call: {
        auto it = cfg_.output_params.find(n.label);
        if (it != cfg_.output_params.end()) {
          for (int pos : it->second)
            if (pos >= 0 && static_cast<std::size_t>(pos) < n.children.size())
              weak_def(n.children[static_cast<std::size_t>(pos)]);
        }
        break;
      }
      default:
        break;
    }
    for (NodeId c : n.children) uses(c);
  }

  void site(NodeId id) {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::Param:
        add_def({n.label, true});
        return;
      case NodeKind::DeclStmt: {
        const auto& decl = at(n.children[0]);
        if (decl.kind == NodeKind::Index) {
          add_def({base_var(decl.children[0]), true});
          uses(decl.children[1]);
        } else {
          add_def({decl.label, true});
        }
        if (n.children.size() > 1) uses(n.children[1]);
        return;
      }
      case NodeKind::AssignStmt: {
        const auto& lhs = at(n.children[0]);
        if (lhs.kind == NodeKind::Index) {
          // element write: reads the base and the subscripts, weakly defines the base
          uses(n.children[0]);
          weak_def(n.children[0]);
        } else {
          add_def({lhs.label, true});
        }
        uses(n.children[1]);
        return;
      }
      case NodeKind::ExprStmt:
      case NodeKind::ReturnStmt:
        for (NodeId c : n.children) uses(c);
        return;
      default:
        // a predicate expression
        uses(id);
        return;
    }
  }

 private:
  std::span<const AstNode> nodes_;
  const DefUseConfig& cfg_;
  SiteDefUse& out_;
};

}  // namespace

SiteDefUse def_use(std::span<const AstNode> nodes, NodeId site, const DefUseConfig& cfg) {
  SiteDefUse out;
  DefUseWalker(nodes, cfg, out).site(site);
  return out;
}

}  // namespace jitvd
