#include <array>
#include <memory>

#include "jitvd/frontend.hpp"

namespace jitvd {
namespace {

// Tree built during descent, then flattened into pre-order ids. Binary
// operators are created after their left operand, so ids cannot be assigned
// on the fly.
struct PNode {
  NodeKind kind;
  std::string label;
  std::string type;
  int line = 0;
  bool is_predicate = false;
  std::vector<std::unique_ptr<PNode>> children;
};
using PNodePtr = std::unique_ptr<PNode>;

PNodePtr make(NodeKind kind, int line, std::string label = {}) {
  auto n = std::make_unique<PNode>();
  n->kind = kind;
  n->line = line;
  n->label = std::move(label);
  return n;
}

bool is_type_keyword(const Token& t) {
  return t.kind == TokenKind::Keyword && (t.text == "int" || t.text == "char" || t.text == "void");
}

class Parser {
 public:
  explicit Parser(std::span<const Token> toks) : toks_(toks) {}

  PNodePtr unit() {
    auto tu = make(NodeKind::TranslationUnit, 1);
    while (!at_end()) {
      if (!is_type_keyword(peek())) fail("declaration or function definition");
      // type ident "(" starts a function; anything else is a global declaration
      std::size_t save = pos_;
      parse_type();
      expect_kind(TokenKind::Identifier, "identifier");
      bool is_func = check(TokenKind::Punctuation, "(");
      pos_ = save;
      if (is_func) {
        tu->children.push_back(funcdef());
      } else {
        tu->children.push_back(declstmt());
      }
    }
    return tu;
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token eof{TokenKind::Punctuation, "<eof>", 0, 0};
    if (pos_ + ahead < toks_.size()) return toks_[pos_ + ahead];
    return eof;
  }

  bool check(TokenKind k, std::string_view text) const { return !at_end() && peek().is(k, text); }
  bool check_op(std::string_view text) const { return check(TokenKind::Operator, text); }
  bool check_punct(std::string_view text) const { return check(TokenKind::Punctuation, text); }

  [[noreturn]] void fail(const std::string& expected) const {
    if (at_end()) {
      int line = toks_.empty() ? 1 : toks_.back().line;
      int col = toks_.empty() ? 1 : toks_.back().col + static_cast<int>(toks_.back().text.size());
      throw ParseError(line, col, expected, "<eof>");
    }
    throw ParseError(peek().line, peek().col, expected, peek().text);
  }

  const Token& take() { return toks_[pos_++]; }

  const Token& expect(TokenKind k, std::string_view text) {
    if (!check(k, text)) fail("'" + std::string(text) + "'");
    return take();
  }

  const Token& expect_kind(TokenKind k, const std::string& what) {
    if (at_end() || peek().kind != k) fail(what);
    return take();
  }

  std::string parse_type() {
    if (at_end() || !is_type_keyword(peek())) fail("type");
    std::string type = take().text;
    while (check_op("*")) {
      take();
      type += "*";
    }
    return type;
  }

  PNodePtr funcdef() {
    int line = peek().line;
    std::string type = parse_type();
    const Token& name = expect_kind(TokenKind::Identifier, "function name");
    auto fn = make(NodeKind::FunctionDef, line, name.text);
    fn->type = type;
    expect(TokenKind::Punctuation, "(");
    if (!check_punct(")")) {
      while (true) {
        int pline = peek().line;
        std::string ptype = parse_type();
        const Token& pname = expect_kind(TokenKind::Identifier, "parameter name");
        auto p = make(NodeKind::Param, pline, pname.text);
        p->type = ptype;
        fn->children.push_back(std::move(p));
        if (!check_punct(",")) break;
        take();
      }
    }
    expect(TokenKind::Punctuation, ")");
    fn->children.push_back(block());
    return fn;
  }

  PNodePtr block() {
    int line = peek().line;
    expect(TokenKind::Punctuation, "{");
    auto b = make(NodeKind::Block, line);
    while (!check_punct("}")) {
      if (at_end()) fail("'}'");
      b->children.push_back(stmt());
    }
    take();
    return b;
  }

  PNodePtr declstmt() {
    int line = peek().line;
    auto d = make(NodeKind::DeclStmt, line);
    d->type = parse_type();
    const Token& name = expect_kind(TokenKind::Identifier, "declarator name");
    auto id = make(NodeKind::Identifier, name.line, name.text);
    if (check_punct("[")) {
      take();
      auto idx = make(NodeKind::Index, name.line, "[]");
      idx->children.push_back(std::move(id));
      idx->children.push_back(expr());
      expect(TokenKind::Punctuation, "]");
      d->children.push_back(std::move(idx));
    } else {
      d->children.push_back(std::move(id));
    }
    if (check_op("=")) {
      take();
      d->children.push_back(expr());
    }
    expect(TokenKind::Punctuation, ";");
    return d;
  }

  PNodePtr stmt() {
    const Token& t = peek();
    if (t.is(TokenKind::Punctuation, "{")) return block();
    if (is_type_keyword(t)) return declstmt();
    if (t.is(TokenKind::Keyword, "if")) {
      auto s = make(NodeKind::IfStmt, take().line);
      expect(TokenKind::Punctuation, "(");
      auto cond = expr();
      cond->is_predicate = true;
      s->children.push_back(std::move(cond));
      expect(TokenKind::Punctuation, ")");
      s->children.push_back(stmt());
      if (check(TokenKind::Keyword, "else")) {
        take();
        s->children.push_back(stmt());
      }
      return s;
    }
    if (t.is(TokenKind::Keyword, "while")) {
      auto s = make(NodeKind::WhileStmt, take().line);
      expect(TokenKind::Punctuation, "(");
      auto cond = expr();
      cond->is_predicate = true;
      s->children.push_back(std::move(cond));
      expect(TokenKind::Punctuation, ")");
      s->children.push_back(stmt());
      return s;
    }
    if (t.is(TokenKind::Keyword, "return")) {
      auto s = make(NodeKind::ReturnStmt, take().line);
      if (!check_punct(";")) s->children.push_back(expr());
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    if (t.kind == TokenKind::Keyword) fail("statement");

    int line = t.line;
    auto lhs = expr();
    if (check_op("=")) {
      const Token& eq = take();
      if (lhs->kind != NodeKind::Identifier && lhs->kind != NodeKind::Index &&
          lhs->kind != NodeKind::MemberAccess) {
        throw ParseError(eq.line, eq.col, "assignable expression before '='", "=");
      }
      auto s = make(NodeKind::AssignStmt, line, "=");
      s->children.push_back(std::move(lhs));
      s->children.push_back(expr());
      expect(TokenKind::Punctuation, ";");
      return s;
    }
    auto s = make(NodeKind::ExprStmt, line);
    s->children.push_back(std::move(lhs));
    expect(TokenKind::Punctuation, ";");
    return s;
  }

  // Precedence levels, loosest first.
  static constexpr std::array<std::array<std::string_view, 4>, 6> kLevels = {{
      {"||"},
      {"&&"},
      {"==", "!="},
      {"<", ">", "<=", ">="},
      {"+", "-"},
      {"*", "/", "%"},
  }};

  PNodePtr expr() { return binary(0); }

  PNodePtr binary(std::size_t level) {
    if (level == kLevels.size()) return unary();
    auto lhs = binary(level + 1);
    while (!at_end() && peek().kind == TokenKind::Operator) {
      bool match = false;
      for (auto op : kLevels[level]) match = match || (!op.empty() && peek().text == op);
      if (!match) break;
      std::string op = take().text;
      auto node = make(NodeKind::BinaryOp, lhs->line, op);
      node->children.push_back(std::move(lhs));
      node->children.push_back(binary(level + 1));
      lhs = std::move(node);
    }
    return lhs;
  }

  PNodePtr unary() {
    if (!at_end() && peek().kind == TokenKind::Operator) {
      const std::string& op = peek().text;
      if (op == "-" || op == "!" || op == "&" || op == "*") {
        const Token& t = take();
        auto node = make(NodeKind::UnaryOp, t.line, t.text);
        node->children.push_back(unary());
        return node;
      }
    }
    return postfix();
  }

  PNodePtr postfix() {
    auto base = primary();
    while (check_punct("[")) {
      take();
      auto idx = make(NodeKind::Index, base->line, "[]");
      idx->children.push_back(std::move(base));
      idx->children.push_back(expr());
      expect(TokenKind::Punctuation, "]");
      base = std::move(idx);
    }
    return base;
  }

  PNodePtr primary() {
    if (at_end()) fail("expression");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::IntLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::CharLiteral:
        take();
        return make(NodeKind::Literal, t.line, t.text);
      case TokenKind::Identifier: {
        take();
        if (check_punct("(")) {
          take();
          auto call = make(NodeKind::Call, t.line, t.text);
          if (!check_punct(")")) {
            while (true) {
              call->children.push_back(expr());
              if (!check_punct(",")) break;
              take();
            }
          }
          expect(TokenKind::Punctuation, ")");
          return call;
        }
        std::string chain = t.text;
        bool member = false;
        while (check_op("->") || check_op(".")) {
          chain += take().text;
          chain += expect_kind(TokenKind::Identifier, "member name").text;
          member = true;
        }
        return make(member ? NodeKind::MemberAccess : NodeKind::Identifier, t.line, chain);
      }
      case TokenKind::Punctuation:
        if (t.text == "(") {
          take();
          auto inner = expr();
          expect(TokenKind::Punctuation, ")");
          return inner;
        }
        break;
      default:
        break;
    }
    fail("expression");
  }

  std::span<const Token> toks_;
  std::size_t pos_ = 0;
};

void flatten(PNode& p, NodeId parent, std::vector<AstNode>& out) {
  AstNode n;
  n.id = static_cast<NodeId>(out.size());
  n.kind = p.kind;
  n.label = std::move(p.label);
  n.type = std::move(p.type);
  n.line = p.line;
  n.is_statement = is_statement_kind(p.kind);
  n.is_predicate = p.is_predicate;
  n.parent = parent;
  const NodeId self = n.id;
  out.push_back(std::move(n));
  for (auto& c : p.children) {
    out[static_cast<std::size_t>(self)].children.push_back(static_cast<NodeId>(out.size()));
    flatten(*c, self, out);
  }
}

}  // namespace

bool is_statement_kind(NodeKind k) {
  switch (k) {
    case NodeKind::Param:
    case NodeKind::DeclStmt:
    case NodeKind::ExprStmt:
    case NodeKind::AssignStmt:
    case NodeKind::IfStmt:
    case NodeKind::WhileStmt:
    case NodeKind::ReturnStmt:
      return true;
    default:
      return false;
  }
}

Ast parse(std::span<const Token> tokens, std::string source_id) {
  Parser p(tokens);
  auto root = p.unit();
  Ast ast;
  ast.source_id = std::move(source_id);
  flatten(*root, kNoNode, ast.nodes);
  return ast;
}

Ast parse_source(std::string_view source, std::string source_id) {
  auto toks = tokenize(source);
  return parse(toks, std::move(source_id));
}

}  // namespace jitvd
