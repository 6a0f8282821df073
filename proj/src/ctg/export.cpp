#include <sstream>

#include "jitvd/ctg.hpp"

namespace jitvd {
namespace {

Alpha alpha_from_name(std::string_view s) {
  if (s == "unchanged") return Alpha::Unchanged;
  if (s == "added") return Alpha::Added;
  if (s == "deleted") return Alpha::Deleted;
  throw InputError("UnknownAlpha", "invalid alpha '" + std::string(s) + "'");
}

std::string_view color(Alpha a) {
  switch (a) {
    case Alpha::Added: return "green";
    case Alpha::Deleted: return "red";
    default: return "gray";
  }
}

nlohmann::json id_or_null(NodeId id) { return id == kNoNode ? nlohmann::json(nullptr) : nlohmann::json(id); }

}  // namespace

nlohmann::json ctg_to_json(const CodeTransformationGraph& g) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nlohmann::json j = {{"id", n.id},
                        {"kind", kind_name(n.kind)},
                        {"label", n.label},
                        {"line_old", n.line_old},
                        {"line_new", n.line_new},
                        {"is_statement", n.is_statement},
                        {"is_predicate", n.is_predicate},
                        {"alpha", alpha_name(n.alpha)},
                        {"old_id", id_or_null(n.old_id)},
                        {"new_id", id_or_null(n.new_id)}};
    if (!n.type.empty()) j["type"] = n.type;
    nodes.push_back(std::move(j));
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"src", e.src},
                     {"dst", e.dst},
                     {"class", class_name(e.relation.cls)},
                     {"subtype", subtype_name(e.relation.subtype)},
                     {"alpha", alpha_name(e.alpha)}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

CodeTransformationGraph ctg_from_json(const nlohmann::json& j) {
  CodeTransformationGraph g;
  try {
    for (const auto& jn : j.at("nodes")) {
      CtgNode n;
      n.id = jn.at("id").get<NodeId>();
      n.kind = kind_from_name(jn.at("kind").get<std::string>());
      n.label = jn.at("label").get<std::string>();
      n.type = jn.value("type", std::string{});
      n.line_old = jn.at("line_old").get<int>();
      n.line_new = jn.at("line_new").get<int>();
      n.is_statement = jn.at("is_statement").get<bool>();
      n.is_predicate = jn.at("is_predicate").get<bool>();
      n.alpha = alpha_from_name(jn.at("alpha").get<std::string>());
      n.old_id = jn.at("old_id").is_null() ? kNoNode : jn.at("old_id").get<NodeId>();
      n.new_id = jn.at("new_id").is_null() ? kNoNode : jn.at("new_id").get<NodeId>();
      if (n.id != static_cast<NodeId>(g.nodes.size())) throw InputError("BadGraph", "node ids must be dense");
      g.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
      CtgEdge e;
      e.src = je.at("src").get<NodeId>();
      e.dst = je.at("dst").get<NodeId>();
      e.relation = relation_from_names(je.at("class").get<std::string>(), je.at("subtype").get<std::string>());
      e.alpha = alpha_from_name(je.at("alpha").get<std::string>());
      if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= g.size() ||
          static_cast<std::size_t>(e.dst) >= g.size())
        throw InputError("BadGraph", "edge endpoint out of range");
      g.edges.push_back(e);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw InputError("BadGraph", ex.what());
  }
  return g;
}

std::string ctg_to_dot(const CodeTransformationGraph& g) {
  std::ostringstream os;
  os << "digraph ctg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& n : g.nodes) {
    os << "  n" << n.id << " [label=\"" << kind_name(n.kind);
    if (!n.label.empty()) os << "\\n" << dot_escape(n.label);
    os << "\", color=" << color(n.alpha) << "];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.src << " -> n" << e.dst << " [style=" << dot_edge_style(e.relation)
       << ", color=" << color(e.alpha) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace jitvd
