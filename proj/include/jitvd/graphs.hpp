#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/frontend.hpp"

namespace jitvd {

enum class RelationClass { Structure = 0, Dependency = 1 };
enum class RelationSubtype { Tree = 0, Data = 1, Control = 2 };

inline constexpr int kNumRelations = 2;

/// The GNN sees only the class; the subtype is kept for mining and explanation.
struct Relation {
  RelationClass cls = RelationClass::Structure;
  RelationSubtype subtype = RelationSubtype::Tree;

  static constexpr Relation tree() { return {RelationClass::Structure, RelationSubtype::Tree}; }
  static constexpr Relation data() { return {RelationClass::Dependency, RelationSubtype::Data}; }
  static constexpr Relation control() { return {RelationClass::Dependency, RelationSubtype::Control}; }

  auto operator<=>(const Relation&) const = default;
};

std::string_view class_name(RelationClass c);
std::string_view subtype_name(RelationSubtype s);
Relation relation_from_names(std::string_view cls, std::string_view subtype);

struct Edge {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  Relation relation;

  auto operator<=>(const Edge&) const = default;
};

/// Calls whose listed argument positions are written by the callee.
struct DefUseConfig {
  std::map<std::string, std::vector<int>> output_params = {
      {"memcpy", {0}}, {"strcpy", {0}}, {"memset", {0}}, {"avio_read", {1}}};
};

/// A definition is strong when it overwrites the whole variable and therefore
/// kills earlier definitions; element writes, address-of arguments and output
/// parameters are weak.
struct Definition {
  std::string var;
  bool strong = true;

  auto operator<=>(const Definition&) const = default;
};

struct SiteDefUse {
  std::vector<Definition> defs;
  std::set<std::string> uses;
};

/// Def/use sets of one flow site: a statement node (param, decl, assign,
/// expr, return) or an if/while predicate.
SiteDefUse def_use(std::span<const AstNode> nodes, NodeId site, const DefUseConfig& cfg = {});

/// Statement-granularity control flow of one function. Slot 0 is the entry,
/// slot 1 the exit; every other slot wraps one flow site.
struct FlowGraph {
  static constexpr int kEntry = 0;
  static constexpr int kExit = 1;
  std::vector<NodeId> site;  // kNoNode for entry/exit
  std::vector<std::vector<int>> succ;
  std::vector<std::vector<int>> pred;
};

FlowGraph build_flow_graph(std::span<const AstNode> nodes, NodeId func);

/// (use site, variable) -> defining sites. Every variable used at a site has
/// an entry, possibly empty.
using ReachingDefs = std::map<std::pair<NodeId, std::string>, std::set<NodeId>>;

ReachingDefs reaching_definitions(const Ast& ast, NodeId func, const DefUseConfig& cfg = {});

/// (predicate, statement) pairs; innermost enclosing predicate only.
std::set<std::pair<NodeId, NodeId>> control_dependence(const Ast& ast, NodeId func);

struct RelationalCodeGraph {
  std::vector<AstNode> nodes;  // the AST nodes, ids preserved
  std::vector<Edge> edges;     // structure (pre-order), then data, then control

  std::size_t size() const { return nodes.size(); }
  const AstNode& operator[](NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
};

RelationalCodeGraph build_rcg(const Ast& ast, const DefUseConfig& cfg = {});

nlohmann::json rcg_to_json(const RelationalCodeGraph& g);
std::string rcg_to_dot(const RelationalCodeGraph& g);

/// solid for structure, dashed for data, dotted for control.
std::string_view dot_edge_style(Relation r);

/// Escapes a string for a double-quoted DOT label.
std::string dot_escape(std::string_view s);

}  // namespace jitvd
