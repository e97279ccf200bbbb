#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sanscan/errors.hpp"

namespace sanscan {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const Span&) const = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind { Source, Call, Var, Str, Concat };

// A call is a sanitizer application unless the callee is a function
// defined in the same document. Sanitizer names resolve against the
// registry at extraction time, not at parse time.
enum class CallKind { Sanitizer, Function };

struct Expr {
  ExprKind kind = ExprKind::Str;
  std::string name;            // Source: source id; Call: callee; Var: name
  std::string text;            // Str contents
  std::vector<ExprPtr> args;   // Call arguments / Concat parts
  CallKind call_kind = CallKind::Sanitizer;
  Span span;
};

struct Stmt;

struct FnDef {
  std::string name;
  std::vector<std::string> params;
  std::vector<Stmt> body;  // statements before the trailing return
  ExprPtr return_expr;
  Span span;
};

enum class StmtKind { Assign, If, Fn, Expr };

struct Stmt {
  StmtKind kind = StmtKind::Expr;
  std::string var;   // Assign target
  ExprPtr expr;      // Assign value / expression statement
  std::vector<Stmt> then_branch;  // If
  std::vector<Stmt> else_branch;  // If
  std::shared_ptr<const FnDef> fn;
  Span span;
};

enum class SegmentKind { Literal, Directive, Sink };

struct Segment {
  SegmentKind kind = SegmentKind::Literal;
  std::string text;          // Literal
  std::vector<Stmt> stmts;   // Directive
  ExprPtr sink_expr;         // Sink
  int sink_index = -1;
  Span span;
};

struct TemplateDoc {
  std::string file_id;
  std::string source;
  std::vector<Segment> segments;
  std::map<std::string, std::shared_ptr<const FnDef>> functions;
  int sink_count = 0;
};

namespace tpldetail {

enum class Tok {
  Ident, Str, LParen, RParen, LBrace, RBrace, Comma, Semi, Eq, Star,
  CloseTag, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

class Parser {
 public:
  Parser(std::string_view text, std::string file_id)
      : src_(text), file_id_(std::move(file_id)) {}

  TemplateDoc parse() {
    TemplateDoc doc;
    doc.file_id = file_id_;
    doc.source = std::string(src_);
    std::size_t lit_start = 0;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<' && pos_ + 1 < src_.size() &&
          src_[pos_ + 1] == '%') {
        flush_literal(doc, lit_start, pos_);
        std::size_t open = pos_;
        pos_ += 2;
        if (pos_ < src_.size() && src_[pos_] == '=') {
          ++pos_;
          parse_sink(doc, open);
        } else {
          parse_directive(doc, open);
        }
        lit_start = pos_;
      } else {
        ++pos_;
      }
    }
    flush_literal(doc, lit_start, src_.size());
    classify_and_check(doc);
    return doc;
  }

 private:
  void flush_literal(TemplateDoc& doc, std::size_t from, std::size_t to) {
    if (to > from) {
      Segment seg;
      seg.kind = SegmentKind::Literal;
      seg.text = std::string(src_.substr(from, to - from));
      seg.span = {from, to};
      doc.segments.push_back(std::move(seg));
    }
  }

  void parse_sink(TemplateDoc& doc, std::size_t open) {
    advance();
    ExprPtr e = parse_expr();
    // Do not lex past the close tag: what follows is literal text.
    if (cur_.kind != Tok::CloseTag) {
      fail(cur_.begin, "expected %> after sink expression");
    }
    Segment seg;
    seg.kind = SegmentKind::Sink;
    seg.sink_expr = std::move(e);
    seg.sink_index = doc.sink_count++;
    seg.span = {open, cur_.end};
    doc.segments.push_back(std::move(seg));
  }

  void parse_directive(TemplateDoc& doc, std::size_t open) {
    advance();
    Segment seg;
    seg.kind = SegmentKind::Directive;
    while (cur_.kind != Tok::CloseTag) {
      if (cur_.kind == Tok::End) fail(cur_.begin, "unterminated directive");
      seg.stmts.push_back(parse_stmt(/*allow_fn=*/true));
    }
    seg.span = {open, pos_};
    doc.segments.push_back(std::move(seg));
    // cur_ is CloseTag; pos_ already sits after it
  }

  Stmt parse_stmt(bool allow_fn) {
    std::size_t start = cur_.begin;
    if (cur_.kind == Tok::Ident && cur_.text == "let") {
      advance();
      Token name = expect(Tok::Ident, "expected variable name after let");
      expect(Tok::Eq, "expected = in let statement");
      ExprPtr value = parse_expr();
      Token semi = expect(Tok::Semi, "expected ; after let statement");
      Stmt s;
      s.kind = StmtKind::Assign;
      s.var = name.text;
      s.expr = std::move(value);
      s.span = {start, semi.end};
      return s;
    }
    if (cur_.kind == Tok::Ident && cur_.text == "if") {
      advance();
      expect(Tok::LParen, "expected ( after if");
      expect(Tok::Star, "if conditions are opaque: write if (*)");
      expect(Tok::RParen, "expected ) after *");
      Stmt s;
      s.kind = StmtKind::If;
      s.then_branch = parse_block();
      if (cur_.kind == Tok::Ident && cur_.text == "else") {
        advance();
        s.else_branch = parse_block();
      }
      s.span = {start, last_end_};
      return s;
    }
    if (cur_.kind == Tok::Ident && cur_.text == "fn") {
      if (!allow_fn) fail(start, "function definitions cannot nest");
      advance();
      Token name = expect(Tok::Ident, "expected function name");
      expect(Tok::LParen, "expected ( after function name");
      auto fn = std::make_shared<FnDef>();
      fn->name = name.text;
      if (cur_.kind != Tok::RParen) {
        for (;;) {
          Token p = expect(Tok::Ident, "expected parameter name");
          fn->params.push_back(p.text);
          if (cur_.kind == Tok::Comma) {
            advance();
            continue;
          }
          break;
        }
      }
      expect(Tok::RParen, "expected ) after parameters");
      expect(Tok::LBrace, "expected { to open function body");
      while (!(cur_.kind == Tok::Ident && cur_.text == "return")) {
        if (cur_.kind == Tok::RBrace) {
          fail(cur_.begin, "function body must end with return");
        }
        if (cur_.kind == Tok::End || cur_.kind == Tok::CloseTag) {
          fail(cur_.begin, "unterminated function body");
        }
        fn->body.push_back(parse_stmt(/*allow_fn=*/false));
      }
      advance();  // return
      fn->return_expr = parse_expr();
      expect(Tok::Semi, "expected ; after return expression");
      Token close = expect(Tok::RBrace, "expected } to close function body");
      fn->span = {start, close.end};
      Stmt s;
      s.kind = StmtKind::Fn;
      s.fn = std::move(fn);
      s.span = {start, close.end};
      return s;
    }
    if (cur_.kind == Tok::Ident && cur_.text == "return") {
      fail(start, "return outside function body");
    }
    ExprPtr e = parse_expr();
    Token semi = expect(Tok::Semi, "expected ; after expression");
    Stmt s;
    s.kind = StmtKind::Expr;
    s.expr = std::move(e);
    s.span = {start, semi.end};
    return s;
  }

  std::vector<Stmt> parse_block() {
    expect(Tok::LBrace, "expected {");
    std::vector<Stmt> stmts;
    while (cur_.kind != Tok::RBrace) {
      if (cur_.kind == Tok::End || cur_.kind == Tok::CloseTag) {
        fail(cur_.begin, "unterminated block");
      }
      stmts.push_back(parse_stmt(/*allow_fn=*/false));
    }
    last_end_ = cur_.end;
    advance();  // }
    return stmts;
  }

  ExprPtr parse_expr() {
    std::size_t start = cur_.begin;
    if (cur_.kind == Tok::Str) {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Str;
      e->text = cur_.text;
      e->span = {start, cur_.end};
      advance();
      return e;
    }
    if (cur_.kind != Tok::Ident) {
      fail(start, "expected expression");
    }
    Token name = cur_;
    advance();
    if (cur_.kind != Tok::LParen) {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Var;
      e->name = name.text;
      e->span = {name.begin, name.end};
      return e;
    }
    advance();  // (
    if (name.text == "source") {
      Token id = expect(Tok::Str, "source() takes one string literal");
      Token close = expect(Tok::RParen, "expected ) after source id");
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Source;
      e->name = id.text;
      e->span = {start, close.end};
      return e;
    }
    std::vector<ExprPtr> args;
    if (cur_.kind != Tok::RParen) {
      for (;;) {
        args.push_back(parse_expr());
        if (cur_.kind == Tok::Comma) {
          advance();
          continue;
        }
        break;
      }
    }
    Token close = expect(Tok::RParen, "expected ) after arguments");
    auto e = std::make_shared<Expr>();
    if (name.text == "concat") {
      if (args.empty()) fail(start, "concat needs at least one argument");
      e->kind = ExprKind::Concat;
    } else {
      e->kind = ExprKind::Call;
      e->name = name.text;
    }
    e->args = std::move(args);
    e->span = {start, close.end};
    return e;
  }

  // ---- lexer -------------------------------------------------------

  void advance() { cur_ = lex(); }

  Token expect(Tok kind, const char* msg) {
    if (cur_.kind != kind) fail(cur_.begin, msg);
    Token t = cur_;
    last_end_ = t.end;
    advance();
    return t;
  }

  Token lex() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    std::size_t start = pos_;
    if (pos_ >= src_.size()) return {Tok::End, {}, start, start};
    char c = src_[pos_];
    if (c == '%' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      pos_ += 2;
      return {Tok::CloseTag, "%>", start, pos_};
    }
    switch (c) {
      case '(': ++pos_; return {Tok::LParen, "(", start, pos_};
      case ')': ++pos_; return {Tok::RParen, ")", start, pos_};
      case '{': ++pos_; return {Tok::LBrace, "{", start, pos_};
      case '}': ++pos_; return {Tok::RBrace, "}", start, pos_};
      case ',': ++pos_; return {Tok::Comma, ",", start, pos_};
      case ';': ++pos_; return {Tok::Semi, ";", start, pos_};
      case '=': ++pos_; return {Tok::Eq, "=", start, pos_};
      case '*': ++pos_; return {Tok::Star, "*", start, pos_};
      default: break;
    }
    if (c == '"') {
      ++pos_;
      std::string text;
      while (pos_ < src_.size()) {
        char d = src_[pos_];
        if (d == '"') {
          ++pos_;
          return {Tok::Str, std::move(text), start, pos_};
        }
        if (d == '\\') {
          if (pos_ + 1 >= src_.size()) break;
          char e = src_[pos_ + 1];
          if (e != '"' && e != '\\') {
            fail(pos_, "unknown escape in string literal");
          }
          text += e;
          pos_ += 2;
          continue;
        }
        text += d;
        ++pos_;
      }
      fail(start, "unterminated string literal");
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        ++pos_;
      }
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)),
              start, pos_};
    }
    fail(start, std::string("unexpected character '") + c + "'");
    return {};
  }

  [[noreturn]] void fail(std::size_t offset, const std::string& msg) const {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < offset && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(line, col, msg);
  }

  // ---- post-parse passes -------------------------------------------

  void classify_and_check(TemplateDoc& doc) {
    for (const auto& seg : doc.segments) {
      if (seg.kind != SegmentKind::Directive) continue;
      for (const auto& st : seg.stmts) {
        if (st.kind != StmtKind::Fn) continue;
        if (doc.functions.contains(st.fn->name)) {
          fail(st.fn->span.begin, "function redefined: " + st.fn->name);
        }
        doc.functions.emplace(st.fn->name, st.fn);
      }
    }
    check_recursion(doc);
    for (auto& seg : doc.segments) {
      if (seg.kind == SegmentKind::Directive) {
        for (auto& st : seg.stmts) classify_stmt(st, doc);
      } else if (seg.kind == SegmentKind::Sink) {
        seg.sink_expr = classify_expr(seg.sink_expr, doc);
      }
    }
    std::map<std::string, std::shared_ptr<const FnDef>> rebuilt;
    for (const auto& [name, fn] : doc.functions) {
      auto copy = std::make_shared<FnDef>(*fn);
      for (auto& st : copy->body) classify_stmt(st, doc);
      copy->return_expr = classify_expr(copy->return_expr, doc);
      rebuilt.emplace(name, std::move(copy));
    }
    doc.functions = std::move(rebuilt);
    // Point Fn statements at the rebuilt definitions.
    for (auto& seg : doc.segments) {
      if (seg.kind != SegmentKind::Directive) continue;
      for (auto& st : seg.stmts) {
        if (st.kind == StmtKind::Fn) st.fn = doc.functions.at(st.fn->name);
      }
    }
  }

  void classify_stmt(Stmt& st, const TemplateDoc& doc) {
    switch (st.kind) {
      case StmtKind::Assign:
      case StmtKind::Expr:
        st.expr = classify_expr(st.expr, doc);
        break;
      case StmtKind::If:
        for (auto& s : st.then_branch) classify_stmt(s, doc);
        for (auto& s : st.else_branch) classify_stmt(s, doc);
        break;
      case StmtKind::Fn:
        break;  // handled via doc.functions
    }
  }

  ExprPtr classify_expr(const ExprPtr& e, const TemplateDoc& doc) {
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args) a = classify_expr(a, doc);
    if (copy->kind == ExprKind::Call) {
      if (doc.functions.contains(copy->name)) {
        copy->call_kind = CallKind::Function;
      } else if (copy->args.size() == 1) {
        copy->call_kind = CallKind::Sanitizer;
      } else {
        // Unresolved multi-argument call; extraction reports it.
        copy->call_kind = CallKind::Function;
      }
    }
    return copy;
  }

  void check_recursion(const TemplateDoc& doc) const {
    // DFS over the call graph of defined functions; any cycle (including
    // a self-call) is rejected.
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    for (const auto& [name, fn] : doc.functions) {
      if (color[name] == 0) dfs(name, doc, color);
    }
  }

  void dfs(const std::string& name, const TemplateDoc& doc,
           std::map<std::string, int>& color) const {
    color[name] = 1;
    const auto& fn = doc.functions.at(name);
    std::vector<std::string> callees;
    for (const auto& st : fn->body) collect_calls_stmt(st, callees);
    collect_calls_expr(fn->return_expr, callees);
    for (const auto& callee : callees) {
      if (!doc.functions.contains(callee)) continue;
      int c = color[callee];
      if (c == 1) throw RecursionError(callee);
      if (c == 0) dfs(callee, doc, color);
    }
    color[name] = 2;
  }

  static void collect_calls_stmt(const Stmt& st,
                                 std::vector<std::string>& out) {
    if (st.expr) collect_calls_expr(st.expr, out);
    for (const auto& s : st.then_branch) collect_calls_stmt(s, out);
    for (const auto& s : st.else_branch) collect_calls_stmt(s, out);
  }

  static void collect_calls_expr(const ExprPtr& e,
                                 std::vector<std::string>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Call) out.push_back(e->name);
    for (const auto& a : e->args) collect_calls_expr(a, out);
  }

  std::string_view src_;
  std::string file_id_;
  std::size_t pos_ = 0;
  std::size_t last_end_ = 0;
  Token cur_;
};

}  // namespace tpldetail

inline TemplateDoc parse_template(std::string_view text, std::string file_id) {
  tpldetail::Parser p(text, std::move(file_id));
  return p.parse();
}

// Substitutes each sink by its value verbatim and deletes directives.
inline std::string render(const TemplateDoc& doc,
                          const std::map<int, std::string>& sink_values) {
  std::string out;
  out.reserve(doc.source.size());
  for (const auto& seg : doc.segments) {
    switch (seg.kind) {
      case SegmentKind::Literal: out += seg.text; break;
      case SegmentKind::Directive: break;
      case SegmentKind::Sink: {
        auto it = sink_values.find(seg.sink_index);
        if (it == sink_values.end()) throw MissingSinkValue(seg.sink_index);
        out += it->second;
        break;
      }
    }
  }
  return out;
}

inline std::string render_empty(const TemplateDoc& doc) {
  std::map<int, std::string> empty;
  for (const auto& seg : doc.segments) {
    if (seg.kind == SegmentKind::Sink) empty[seg.sink_index] = "";
  }
  return render(doc, empty);
}

// Sink offsets within the document rendered with empty strings at every
// sink, in document order.
inline std::vector<std::pair<int, std::size_t>> locate_sinks(
    const TemplateDoc& doc) {
  std::vector<std::pair<int, std::size_t>> out;
  std::size_t offset = 0;
  for (const auto& seg : doc.segments) {
    if (seg.kind == SegmentKind::Literal) {
      offset += seg.text.size();
    } else if (seg.kind == SegmentKind::Sink) {
      out.emplace_back(seg.sink_index, offset);
    }
  }
  return out;
}

}  // namespace sanscan
