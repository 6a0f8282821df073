#pragma once

// MiniC frontend: a deterministic C-like language with declarations, arrays,
// calls, if/while, member chains and address-of. No preprocessor, no `for`,
// `switch` or `goto`.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "jitvd/errors.hpp"

namespace jitvd {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class TokenKind { Identifier, Keyword, IntLiteral, StringLiteral, CharLiteral, Operator, Punctuation };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int col;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

std::vector<Token> tokenize(std::string_view source);

enum class NodeKind {
  TranslationUnit,
  FunctionDef,
  Param,
  Block,
  DeclStmt,
  ExprStmt,
  AssignStmt,
  IfStmt,
  WhileStmt,
  ReturnStmt,
  Call,
  BinaryOp,
  UnaryOp,
  Index,
  MemberAccess,
  Identifier,
  Literal,
};

std::string_view kind_name(NodeKind k);
NodeKind kind_from_name(std::string_view name);

/// One syntax node. Children are stored as ids into the owning node array,
/// so the same record doubles as a relational-code-graph node.
///
/// Layout conventions:
///  - function-def: label = name, type = return type, children = params..., block
///  - param:        label = name, type = declared type
///  - decl-stmt:    type = declared type, children = declarator [, init]
///                  where the declarator is an identifier or an index node
///  - assign-stmt:  label "=", children = lvalue, rhs
///  - if-stmt:      children = predicate, then [, else]
///  - while-stmt:   children = predicate, body
///  - call:         label = callee, children = args
///  - member-access: leaf whose label is the whole chain (`st->codec->extradata`)
struct AstNode {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::TranslationUnit;
  std::string label;
  std::string type;
  int line = 0;
  bool is_statement = false;
  bool is_predicate = false;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
};

/// Statement kinds are the definition/use sites of the dependency relation.
/// Parameters count as statements: they are the entry definitions of a
/// function and carry the header line.
bool is_statement_kind(NodeKind k);

struct Ast {
  std::string source_id;
  std::vector<AstNode> nodes;  // pre-order; nodes[i].id == i; root is 0

  const AstNode& root() const { return nodes.front(); }
  const AstNode& operator[](NodeId id) const { return nodes[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return nodes.size(); }
};

Ast parse(std::span<const Token> tokens, std::string source_id = {});

/// tokenize + parse.
Ast parse_source(std::string_view source, std::string source_id = {});

std::string canonical_print(const Ast& ast);

/// Canonical text of the subtree rooted at `id`, printed at indent 0 without
/// a trailing newline. Used as the statement key for version alignment.
std::string print_subtree(std::span<const AstNode> nodes, NodeId id);

/// Kinds, labels, types and shape equal; ids and lines ignored.
bool structurally_equal(const Ast& a, const Ast& b);

nlohmann::json ast_to_json(const Ast& ast);

/// Token used to embed the node's content: its label, or its kind name for
/// purely structural nodes.
std::string content_token(const AstNode& n);

}  // namespace jitvd
