#include <sstream>

#include "jitvd/graphs.hpp"

namespace jitvd {

std::string_view class_name(RelationClass c) {
  return c == RelationClass::Structure ? "structure" : "dependency";
}

std::string_view subtype_name(RelationSubtype s) {
  switch (s) {
    case RelationSubtype::Tree: return "tree";
    case RelationSubtype::Data: return "data";
    case RelationSubtype::Control: return "control";
  }
  return "?";
}

Relation relation_from_names(std::string_view cls, std::string_view subtype) {
  if (cls == "structure" && subtype == "tree") return Relation::tree();
  if (cls == "dependency" && subtype == "data") return Relation::data();
  if (cls == "dependency" && subtype == "control") return Relation::control();
  throw InputError("UnknownRelation", "invalid relation " + std::string(cls) + "/" + std::string(subtype));
}

RelationalCodeGraph build_rcg(const Ast& ast, const DefUseConfig& cfg) {
  RelationalCodeGraph g;
  g.nodes = ast.nodes;
  for (const auto& n : ast.nodes)
    for (NodeId c : n.children) g.edges.push_back({n.id, c, Relation::tree()});

  if (ast.nodes.empty()) return g;
  std::set<Edge> data, control;
  for (NodeId item : ast.root().children) {
    if (ast[item].kind != NodeKind::FunctionDef) continue;
    for (const auto& [use, defs] : reaching_definitions(ast, item, cfg))
      for (NodeId d : defs) data.insert({d, use.first, Relation::data()});
    for (const auto& [p, s] : control_dependence(ast, item)) control.insert({p, s, Relation::control()});
  }
  g.edges.insert(g.edges.end(), data.begin(), data.end());
  g.edges.insert(g.edges.end(), control.begin(), control.end());
  return g;
}

nlohmann::json rcg_to_json(const RelationalCodeGraph& g) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nlohmann::json j = {{"id", n.id},
                        {"kind", kind_name(n.kind)},
                        {"label", n.label},
                        {"line", n.line},
                        {"is_statement", n.is_statement},
                        {"is_predicate", n.is_predicate}};
    if (!n.type.empty()) j["type"] = n.type;
    nodes.push_back(std::move(j));
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"src", e.src},
                     {"dst", e.dst},
                     {"class", class_name(e.relation.cls)},
                     {"subtype", subtype_name(e.relation.subtype)}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string_view dot_edge_style(Relation r) {
  switch (r.subtype) {
    case RelationSubtype::Tree: return "solid";
    case RelationSubtype::Data: return "dashed";
    case RelationSubtype::Control: return "dotted";
  }
  return "solid";
}

std::string rcg_to_dot(const RelationalCodeGraph& g) {
  std::ostringstream os;
  os << "digraph rcg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& n : g.nodes) {
    os << "  n" << n.id << " [label=\"" << kind_name(n.kind);
    if (!n.label.empty()) os << "\\n" << dot_escape(n.label);
    os << "\"];\n";
  }
  for (const auto& e : g.edges)
    os << "  n" << e.src << " -> n" << e.dst << " [style=" << dot_edge_style(e.relation) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace jitvd
