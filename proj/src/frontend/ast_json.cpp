#include <array>
#include <utility>

#include "jitvd/frontend.hpp"

namespace jitvd {
namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 17> kKindNames = {{
    {NodeKind::TranslationUnit, "translation-unit"},
    {NodeKind::FunctionDef, "function-def"},
    {NodeKind::Param, "param"},
    {NodeKind::Block, "block"},
    {NodeKind::DeclStmt, "decl-stmt"},
    {NodeKind::ExprStmt, "expr-stmt"},
    {NodeKind::AssignStmt, "assign-stmt"},
    {NodeKind::IfStmt, "if-stmt"},
    {NodeKind::WhileStmt, "while-stmt"},
    {NodeKind::ReturnStmt, "return-stmt"},
    {NodeKind::Call, "call"},
    {NodeKind::BinaryOp, "binary-op"},
    {NodeKind::UnaryOp, "unary-op"},
    {NodeKind::Index, "index"},
    {NodeKind::MemberAccess, "member-access"},
    {NodeKind::Identifier, "identifier"},
    {NodeKind::Literal, "literal"},
}};

nlohmann::json node_json(const Ast& ast, NodeId id) {
  const auto& n = ast[id];
  nlohmann::json j = {
      {"id", n.id},
      {"kind", kind_name(n.kind)},
      {"label", n.label},
      {"line", n.line},
      {"is_statement", n.is_statement},
      {"is_predicate", n.is_predicate},
  };
  if (!n.type.empty()) j["type"] = n.type;
  auto children = nlohmann::json::array();
  for (NodeId c : n.children) children.push_back(node_json(ast, c));
  j["children"] = std::move(children);
  return j;
}

}  // namespace

std::string_view kind_name(NodeKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

NodeKind kind_from_name(std::string_view name) {
  for (const auto& [kind, n] : kKindNames)
    if (n == name) return kind;
  throw InputError("UnknownKind", "unknown node kind '" + std::string(name) + "'");
}

std::string content_token(const AstNode& n) {
  return n.label.empty() ? std::string(kind_name(n.kind)) : n.label;
}

nlohmann::json ast_to_json(const Ast& ast) {
  if (ast.nodes.empty()) return nlohmann::json::object();
  return node_json(ast, 0);
}

}  // namespace jitvd
