#include <array>
#include <cctype>

#include "jitvd/frontend.hpp"

namespace jitvd {
namespace {

constexpr std::array<std::string_view, 13> kKeywords = {
    "int", "char", "void", "if", "else", "while", "return",
    // reserved: recognised so the parser can reject them by name
    "for", "switch", "goto", "do", "break", "continue"};

// Longest match first.
constexpr std::array<std::string_view, 18> kOperators = {
    "->", "==", "!=", "<=", ">=", "&&", "||", "+", "-", "*", "/", "%", "<", ">", "=", "!", "&", "."};

constexpr std::string_view kPunctuation = "(){}[];,";

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int l = line_, k = col_;
        advance(2);
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) throw LexError(l, k, "unterminated comment");
        advance(2);
      } else {
        return;
      }
    }
  }

  Token next() {
    const int line = line_, col = col_;
    const std::size_t start = pos_;
    char c = peek();

    if (is_ident_start(c)) {
      while (is_ident_char(peek())) advance();
      std::string text(src_.substr(start, pos_ - start));
      bool kw = false;
      for (auto k : kKeywords) kw = kw || k == text;
      return {kw ? TokenKind::Keyword : TokenKind::Identifier, std::move(text), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (is_ident_start(peek())) throw LexError(line_, col_, "malformed integer literal");
      return {TokenKind::IntLiteral, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (c == '"' || c == '\'') {
      const char quote = c;
      advance();
      while (pos_ < src_.size() && peek() != quote && peek() != '\n') {
        if (peek() == '\\') advance();
        advance();
      }
      if (peek() != quote) throw LexError(line, col, "unterminated literal");
      advance();
      return {quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral,
              std::string(src_.substr(start, pos_ - start)), line, col};
    }
    for (auto op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        advance(op.size());
        return {TokenKind::Operator, std::string(op), line, col};
      }
    }
    if (kPunctuation.find(c) != std::string_view::npos) {
      advance();
      return {TokenKind::Punctuation, std::string(1, c), line, col};
    }
    throw LexError(line, col, std::string("illegal character '") + c + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace jitvd
