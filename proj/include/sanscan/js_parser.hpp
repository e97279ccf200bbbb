#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sanscan {

// Where a partial JS text leaves the lexer. Used to extend HTML context
// stacks into attribute values and script bodies.
enum class JsEndMode { Code, String, LineComment, BlockComment };

struct JsEndState {
  JsEndMode mode = JsEndMode::Code;
  char quote = '\'';  // meaningful only when mode == String
};

// Tolerant lexical scan of a possibly-truncated JS source: reports whether
// the end of the text sits in code, inside a string literal, or inside a
// comment. Never fails.
inline JsEndState js_scan_mode(std::string_view src) {
  JsEndState st;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    switch (st.mode) {
      case JsEndMode::Code:
        if (c == '\'' || c == '"') {
          st.mode = JsEndMode::String;
          st.quote = c;
          ++i;
        } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
          st.mode = JsEndMode::LineComment;
          i += 2;
        } else if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
          st.mode = JsEndMode::BlockComment;
          i += 2;
        } else {
          ++i;
        }
        break;
      case JsEndMode::String:
        if (c == '\\' && i + 1 < src.size()) {
          i += 2;
        } else if (c == st.quote) {
          st.mode = JsEndMode::Code;
          ++i;
        } else {
          ++i;
        }
        break;
      case JsEndMode::LineComment:
        if (c == '\n') st.mode = JsEndMode::Code;
        ++i;
        break;
      case JsEndMode::BlockComment:
        if (c == '*' && i + 1 < src.size() && src[i + 1] == '/') {
          st.mode = JsEndMode::Code;
          i += 2;
        } else {
          ++i;
        }
        break;
    }
  }
  return st;
}

namespace jsdetail {

enum class Tok { Ident, Number, String, LParen, RParen, Dot, Comma, Eq, Semi, End, Bad };

struct Token {
  Tok kind = Tok::Bad;
  std::string text;  // ident spelling
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  // Returns Bad on any lexical error (unterminated string or block
  // comment, raw newline inside a string, unknown escape or character).
  Token next() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
          c == '\v') {
        ++pos_;
        continue;
      }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        pos_ += 2;
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
        continue;
      }
      if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        pos_ += 2;
        bool closed = false;
        while (pos_ + 1 < src_.size()) {
          if (src_[pos_] == '*' && src_[pos_ + 1] == '/') {
            pos_ += 2;
            closed = true;
            break;
          }
          ++pos_;
        }
        if (!closed) return {Tok::Bad, {}};
        continue;
      }
      break;
    }
    if (pos_ >= src_.size()) return {Tok::End, {}};

    char c = src_[pos_];
    if (c == '(') { ++pos_; return {Tok::LParen, {}}; }
    if (c == ')') { ++pos_; return {Tok::RParen, {}}; }
    if (c == '.') { ++pos_; return {Tok::Dot, {}}; }
    if (c == ',') { ++pos_; return {Tok::Comma, {}}; }
    if (c == ';') { ++pos_; return {Tok::Semi, {}}; }
    if (c == '=') { ++pos_; return {Tok::Eq, {}}; }
    if (c == '\'' || c == '"') return lex_string(c);
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_' || src_[pos_] == '$')) {
        ++pos_;
      }
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start))};
    }
    return {Tok::Bad, {}};
  }

 private:
  Token lex_string(char quote) {
    ++pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == quote) {
        ++pos_;
        return {Tok::String, {}};
      }
      if (c == '\n' || c == '\r') return {Tok::Bad, {}};
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) return {Tok::Bad, {}};
        char e = src_[pos_ + 1];
        if (e != '\\' && e != '\'' && e != '"' && e != 'n' && e != 'r' &&
            e != 't') {
          return {Tok::Bad, {}};
        }
        pos_ += 2;
        continue;
      }
      ++pos_;
    }
    return {Tok::Bad, {}};  // unterminated
  }

  Token lex_number() {
    while (pos_ < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      ++pos_;
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
      }
    }
    return {Tok::Number, {}};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Recursive-descent parser for the mini grammar:
//   Program := Stmt*
//   Stmt    := ";" | Expr (";" | end-of-program)
//   Expr    := Assign | Call | Member | Ident | StringLit | NumberLit
//            | "(" Expr ")"
//   Assign  := Member "=" Expr
//   Call    := Member "(" args ")"
//   Member  := Ident ("." Ident)*
// Statements must be separated by ";" — juxtaposed expressions do not
// parse, matching how a browser treats "f(1)g(2)".
class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  // Parses the whole program; on success fills callees with the callee
  // name of every statement-level call whose target is a bare identifier
  // (parentheses around the call are looked through).
  bool parse_program(std::vector<std::string>* callees) {
    while (ok_ && cur_.kind != Tok::End) {
      if (cur_.kind == Tok::Semi) {
        advance();
        continue;
      }
      ExprInfo e = parse_expr();
      if (!ok_) return false;
      if (cur_.kind == Tok::Semi) {
        advance();
      } else if (cur_.kind != Tok::End) {
        return false;
      }
      if (callees && e.bare_call) callees->push_back(e.callee);
    }
    return ok_;
  }

 private:
  struct ExprInfo {
    bool bare_call = false;
    std::string callee;
  };

  void advance() {
    cur_ = lex_.next();
    if (cur_.kind == Tok::Bad) ok_ = false;
  }

  ExprInfo parse_expr() {
    if (!ok_) return {};
    if (cur_.kind == Tok::LParen) {
      advance();
      ExprInfo inner = parse_expr();
      if (!ok_ || cur_.kind != Tok::RParen) {
        ok_ = false;
        return {};
      }
      advance();
      return inner;  // parenthesized call still counts as a call
    }
    if (cur_.kind == Tok::String || cur_.kind == Tok::Number) {
      advance();
      return {};
    }
    if (cur_.kind != Tok::Ident) {
      ok_ = false;
      return {};
    }
    std::string first = cur_.text;
    int parts = 1;
    advance();
    while (ok_ && cur_.kind == Tok::Dot) {
      advance();
      if (cur_.kind != Tok::Ident) {
        ok_ = false;
        return {};
      }
      ++parts;
      advance();
    }
    if (!ok_) return {};
    if (cur_.kind == Tok::LParen) {
      advance();
      parse_args();
      if (!ok_) return {};
      ExprInfo e;
      e.bare_call = parts == 1;
      e.callee = first;
      return e;
    }
    if (cur_.kind == Tok::Eq) {
      advance();
      parse_expr();
      return {};
    }
    return {};  // plain member / identifier
  }

  void parse_args() {
    if (cur_.kind == Tok::RParen) {
      advance();
      return;
    }
    while (ok_) {
      parse_expr();
      if (!ok_) return;
      if (cur_.kind == Tok::Comma) {
        advance();
        continue;
      }
      break;
    }
    if (!ok_ || cur_.kind != Tok::RParen) {
      ok_ = false;
      return;
    }
    advance();
  }

  Lexer lex_;
  Token cur_;
  bool ok_ = true;
};

inline bool ascii_iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace jsdetail

// True iff src is a valid program under the mini-JS grammar.
inline bool js_parses(std::string_view src) {
  jsdetail::Parser p(src);
  return p.parse_program(nullptr);
}

// True iff src parses and contains a statement-level call whose callee is
// a bare identifier equal to `canary`, ASCII case-insensitively.
inline bool js_has_canary_stmt(std::string_view src, std::string_view canary) {
  jsdetail::Parser p(src);
  std::vector<std::string> callees;
  if (!p.parse_program(&callees)) return false;
  for (const auto& name : callees) {
    if (jsdetail::ascii_iequals(name, canary)) return true;
  }
  return false;
}

}  // namespace sanscan
