#include "jitvd/frontend.hpp"

namespace jitvd {
namespace {

constexpr int kPostfixPrec = 8;
constexpr int kUnaryPrec = 7;
constexpr int kAtomPrec = 9;

int binary_prec(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=") return 3;
  if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
  if (op == "+" || op == "-") return 5;
  return 6;
}

class Printer {
 public:
  explicit Printer(std::span<const AstNode> nodes) : nodes_(nodes) {}

  const AstNode& at(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  int prec(NodeId id) const {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::BinaryOp: return binary_prec(n.label);
      case NodeKind::UnaryOp: return kUnaryPrec;
      case NodeKind::Index: return kPostfixPrec;
      default: return kAtomPrec;
    }
  }

  std::string wrap(NodeId id, bool parens) const {
    return parens ? "(" + expr(id) + ")" : expr(id);
  }

  std::string expr(NodeId id) const {
    const auto& n = at(id);
    switch (n.kind) {
      case NodeKind::BinaryOp: {
        int p = binary_prec(n.label);
        return wrap(n.children[0], prec(n.children[0]) < p) + " " + n.label + " " +
               wrap(n.children[1], prec(n.children[1]) <= p);
      }
      case NodeKind::UnaryOp: {
        NodeId c = n.children[0];
        return n.label + wrap(c, prec(c) <= kUnaryPrec);
      }
      case NodeKind::Index:
        return wrap(n.children[0], prec(n.children[0]) < kPostfixPrec) + "[" + expr(n.children[1]) + "]";
      case NodeKind::Call: {
        std::string s = n.label + "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) s += ", ";
          s += expr(n.children[i]);
        }
        return s + ")";
      }
      default:
        return n.label;
    }
  }

  static std::string indent(int level) { return std::string(static_cast<std::size_t>(level) * 4, ' '); }

  // Writes a branch body after a header; leaves the cursor after "}" for
  // blocks and after the newline otherwise. Returns whether it was a block.
  bool branch(NodeId body, int level, std::string& out) const {
    const auto& b = at(body);
    if (b.kind == NodeKind::Block) {
      out += " {\n";
      for (NodeId c : b.children) stmt(c, level + 1, out);
      out += indent(level) + "}";
      return true;
    }
    out += "\n";
    stmt(body, level + 1, out);
    return false;
  }

  void stmt(NodeId id, int level, std::string& out) const {
    const auto& n = at(id);
    const std::string ind = indent(level);
    switch (n.kind) {
      case NodeKind::Block:
        out += ind + "{\n";
        for (NodeId c : n.children) stmt(c, level + 1, out);
        out += ind + "}\n";
        return;
      case NodeKind::DeclStmt:
        out += ind + n.type + " " + expr(n.children[0]);
        if (n.children.size() > 1) out += " = " + expr(n.children[1]);
        out += ";\n";
        return;
      case NodeKind::AssignStmt:
        out += ind + expr(n.children[0]) + " = " + expr(n.children[1]) + ";\n";
        return;
      case NodeKind::ExprStmt:
        out += ind + expr(n.children[0]) + ";\n";
        return;
      case NodeKind::ReturnStmt:
        out += ind + "return";
        if (!n.children.empty()) out += " " + expr(n.children[0]);
        out += ";\n";
        return;
      case NodeKind::IfStmt:
      case NodeKind::WhileStmt: {
        out += ind + (n.kind == NodeKind::IfStmt ? "if (" : "while (") + expr(n.children[0]) + ")";
        bool block = branch(n.children[1], level, out);
        if (n.children.size() > 2) {
          out += block ? " else" : ind + "else";
          block = branch(n.children[2], level, out);
        }
        if (block) out += "\n";
        return;
      }
      case NodeKind::FunctionDef: {
        out += ind + n.type + " " + n.label + "(";
        for (std::size_t i = 0; i + 1 < n.children.size(); ++i) {
          if (i) out += ", ";
          out += at(n.children[i]).type + " " + at(n.children[i]).label;
        }
        out += ")";
        branch(n.children.back(), level, out);
        out += "\n";
        return;
      }
      case NodeKind::Param:
        out += ind + n.type + " " + n.label + "\n";
        return;
      case NodeKind::TranslationUnit:
        for (std::size_t i = 0; i < n.children.size(); ++i) {
          if (i) out += "\n";
          stmt(n.children[i], level, out);
        }
        return;
      default:
        out += ind + expr(id) + "\n";
        return;
    }
  }

 private:
  std::span<const AstNode> nodes_;
};

bool subtree_equal(const Ast& a, NodeId x, const Ast& b, NodeId y) {
  const auto& m = a[x];
  const auto& n = b[y];
  if (m.kind != n.kind || m.label != n.label || m.type != n.type || m.is_predicate != n.is_predicate ||
      m.children.size() != n.children.size())
    return false;
  for (std::size_t i = 0; i < m.children.size(); ++i)
    if (!subtree_equal(a, m.children[i], b, n.children[i])) return false;
  return true;
}

}  // namespace

std::string canonical_print(const Ast& ast) {
  std::string out;
  if (ast.nodes.empty()) return out;
  Printer(ast.nodes).stmt(0, 0, out);
  return out;
}

std::string print_subtree(std::span<const AstNode> nodes, NodeId id) {
  std::string out;
  Printer p(nodes);
  const auto& n = nodes[static_cast<std::size_t>(id)];
  if (is_statement_kind(n.kind) || n.kind == NodeKind::Block || n.kind == NodeKind::FunctionDef ||
      n.kind == NodeKind::TranslationUnit) {
    p.stmt(id, 0, out);
    while (!out.empty() && out.back() == '\n') out.pop_back();
  } else {
    out = p.expr(id);
  }
  return out;
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (a.nodes.empty() || b.nodes.empty()) return a.nodes.empty() == b.nodes.empty();
  return subtree_equal(a, 0, b, 0);
}

}  // namespace jitvd
