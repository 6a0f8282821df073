#include <algorithm>

#include "jitvd/ctg.hpp"
#include "jitvd/lcs.hpp"

namespace jitvd {
namespace {

bool same_key(const AstNode& a, const AstNode& b) {
  return a.kind == b.kind && a.label == b.label && a.type == b.type;
}

class Matcher {
 public:
  Matcher(const RelationalCodeGraph& o, const RelationalCodeGraph& n)
      : old_(o), new_(n), old_to_new_(o.size(), kNoNode), new_to_old_(n.size(), kNoNode) {}

  NodeMatching run() {
    if (!old_.nodes.empty() && !new_.nodes.empty()) match_pair(0, 0);
    NodeMatching m;
    for (std::size_t i = 0; i < old_to_new_.size(); ++i) {
      if (old_to_new_[i] == kNoNode) {
        m.unmatched_old.push_back(static_cast<NodeId>(i));
      } else {
        m.pairs.emplace_back(static_cast<NodeId>(i), old_to_new_[i]);
      }
    }
    for (std::size_t j = 0; j < new_to_old_.size(); ++j)
      if (new_to_old_[j] == kNoNode) m.unmatched_new.push_back(static_cast<NodeId>(j));
    return m;
  }

 private:
  void match_pair(NodeId a, NodeId b) {
    old_to_new_[static_cast<std::size_t>(a)] = b;
    new_to_old_[static_cast<std::size_t>(b)] = a;
    const auto& x = old_[a];
    switch (x.kind) {
      case NodeKind::TranslationUnit:
        match_unit(a, b);
        break;
      case NodeKind::Block:
        align_sequence(old_[a].children, new_[b].children);
        break;
      default:
        match_children_greedy(a, b);
        break;
    }
  }

  void match_unit(NodeId a, NodeId b) {
    std::vector<NodeId> rest_old, rest_new;
    std::vector<bool> used(new_[b].children.size(), false);
    for (NodeId oc : old_[a].children) {
      if (old_[oc].kind != NodeKind::FunctionDef) {
        rest_old.push_back(oc);
        continue;
      }
      const auto& nc_list = new_[b].children;
      for (std::size_t k = 0; k < nc_list.size(); ++k) {
        const auto& nc = new_[nc_list[k]];
        if (!used[k] && nc.kind == NodeKind::FunctionDef && nc.label == old_[oc].label) {
          used[k] = true;
          match_pair(oc, nc_list[k]);
          break;
        }
      }
    }
    for (NodeId nc : new_[b].children)
      if (new_[nc].kind != NodeKind::FunctionDef) rest_new.push_back(nc);
    align_sequence(rest_old, rest_new);
  }

  // Statement-sequence alignment inside a block (or the top level).
  void align_sequence(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::vector<std::string> ka, kb;
    for (NodeId id : a) ka.push_back(print_subtree(old_.nodes, id));
    for (NodeId id : b) kb.push_back(print_subtree(new_.nodes, id));
    auto anchors = lcs_align<std::string>(ka, kb);

    std::size_t pi = 0, pj = 0;
    auto secondary = [&](std::size_t end_i, std::size_t end_j) {
      for (std::size_t i = pi, j = pj; i < end_i && j < end_j; ++i, ++j)
        if (old_[a[i]].kind == new_[b[j]].kind) match_pair(a[i], b[j]);
    };
    for (const auto& [i, j] : anchors) {
      secondary(i, j);
      match_pair(a[i], b[j]);
      pi = i + 1;
      pj = j + 1;
    }
    secondary(a.size(), b.size());
  }

  void match_children_greedy(NodeId a, NodeId b) {
    const auto& ca = old_[a].children;
    const auto& cb = new_[b].children;
    std::vector<NodeId> paired_new(ca.size(), kNoNode);
    std::vector<bool> used(cb.size(), false);
    for (std::size_t i = 0; i < ca.size() && i < cb.size(); ++i) {
      if (same_key(old_[ca[i]], new_[cb[i]])) {
        paired_new[i] = cb[i];
        used[i] = true;
      }
    }
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (paired_new[i] != kNoNode) continue;
      for (std::size_t j = 0; j < cb.size(); ++j) {
        if (!used[j] && same_key(old_[ca[i]], new_[cb[j]])) {
          paired_new[i] = cb[j];
          used[j] = true;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < ca.size(); ++i)
      if (paired_new[i] != kNoNode) match_pair(ca[i], paired_new[i]);
  }

  const RelationalCodeGraph& old_;
  const RelationalCodeGraph& new_;
  std::vector<NodeId> old_to_new_;
  std::vector<NodeId> new_to_old_;
};

}  // namespace

NodeMatching match_versions(const RelationalCodeGraph& g_old, const RelationalCodeGraph& g_new) {
  return Matcher(g_old, g_new).run();
}

}  // namespace jitvd
