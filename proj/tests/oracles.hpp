// Test-only oracles, kept independent of the implementation paths they
// check: a direct interpreter for corpus programs, a template-markup
// stripper, and a brute-force attack enumerator.
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sanscan/attack_gen.hpp"
#include "sanscan/browser_model.hpp"
#include "sanscan/context.hpp"
#include "sanscan/sanitizers.hpp"
#include "sanscan/template_doc.hpp"

namespace oracles {

// Deletes every <% ... %> run from the raw text, honoring double-quoted
// strings, without going through the parser. What remains is what
// rendering with empty sink values must produce.
inline std::string strip_template_markup(std::string_view src) {
  std::string out;
  std::size_t i = 0;
  while (i < src.size()) {
    if (src[i] == '<' && i + 1 < src.size() && src[i + 1] == '%') {
      i += 2;
      if (i < src.size() && src[i] == '=') ++i;
      bool in_str = false;
      while (i < src.size()) {
        char c = src[i];
        if (in_str) {
          if (c == '\\') {
            i += 2;
          } else {
            if (c == '"') in_str = false;
            ++i;
          }
          continue;
        }
        if (c == '"') {
          in_str = true;
          ++i;
          continue;
        }
        if (c == '%' && i + 1 < src.size() && src[i + 1] == '>') {
          i += 2;
          break;
        }
        ++i;
      }
    } else {
      out += src[i++];
    }
  }
  return out;
}

// Direct execution of a corpus program along one control-flow path:
// branch k takes its then-arm iff bit k of `decisions` is set, sources
// evaluate via `source_value`, sanitizers run for real. Returns the
// concrete string each sink receives.
class ConcreteRun {
 public:
  ConcreteRun(const sanscan::TemplateDoc& doc,
              const sanscan::SanitizerRegistry& registry,
              std::uint32_t decisions)
      : doc_(doc), registry_(registry), decisions_(decisions) {}

  static std::string source_value(const std::string& id) {
    return "TAINT" + id + "END";
  }

  std::map<int, std::string> run() {
    std::map<int, std::string> sinks;
    std::map<std::string, std::string> env;
    for (const auto& seg : doc_.segments) {
      switch (seg.kind) {
        case sanscan::SegmentKind::Literal: break;
        case sanscan::SegmentKind::Directive:
          for (const auto& st : seg.stmts) exec(st, env);
          break;
        case sanscan::SegmentKind::Sink:
          sinks[seg.sink_index] = eval(seg.sink_expr, env);
          break;
      }
    }
    return sinks;
  }

 private:
  void exec(const sanscan::Stmt& st, std::map<std::string, std::string>& env) {
    switch (st.kind) {
      case sanscan::StmtKind::Assign:
        env[st.var] = eval(st.expr, env);
        break;
      case sanscan::StmtKind::If: {
        bool take_then = (decisions_ >> next_branch_++) & 1u;
        const auto& branch = take_then ? st.then_branch : st.else_branch;
        for (const auto& s : branch) exec(s, env);
        break;
      }
      case sanscan::StmtKind::Expr:
        eval(st.expr, env);
        break;
      case sanscan::StmtKind::Fn:
        break;
    }
  }

  std::string eval(const sanscan::ExprPtr& e,
                   const std::map<std::string, std::string>& env) {
    switch (e->kind) {
      case sanscan::ExprKind::Str: return e->text;
      case sanscan::ExprKind::Source: return source_value(e->name);
      case sanscan::ExprKind::Var: {
        auto it = env.find(e->name);
        return it == env.end() ? "" : it->second;
      }
      case sanscan::ExprKind::Concat: {
        std::string out;
        for (const auto& part : e->args) out += eval(part, env);
        return out;
      }
      case sanscan::ExprKind::Call:
        if (e->call_kind == sanscan::CallKind::Sanitizer) {
          auto id = registry_.resolve(e->name);
          return sanscan::apply_sanitizer(registry_, *id,
                                          eval(e->args[0], env));
        } else {
          const auto& fn = doc_.functions.at(e->name);
          std::map<std::string, std::string> local;
          for (std::size_t i = 0; i < fn->params.size(); ++i) {
            local[fn->params[i]] = eval(e->args[i], env);
          }
          for (const auto& st : fn->body) exec(st, local);
          return eval(fn->return_expr, local);
        }
    }
    return "";
  }

  const sanscan::TemplateDoc& doc_;
  const sanscan::SanitizerRegistry& registry_;
  std::uint32_t decisions_;
  int next_branch_ = 0;
};

// All distinct sink-value maps over every combination of up to
// `max_branches` dynamic branch decisions.
inline std::vector<std::map<int, std::string>> all_concrete_runs(
    const sanscan::TemplateDoc& doc, const sanscan::SanitizerRegistry& registry,
    int max_branches = 8) {
  std::vector<std::map<int, std::string>> out;
  for (std::uint32_t mask = 0; mask < (1u << max_branches); ++mask) {
    auto sinks = ConcreteRun(doc, registry, mask).run();
    bool seen = false;
    for (const auto& prev : out) {
      if (prev == sinks) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(sinks));
  }
  return out;
}

// Closing alphabet for the brute-force search, written out by hand from
// the frame kinds present at an injection point.
inline std::vector<std::string> brute_alphabet(const sanscan::ContextStack& ctx) {
  std::set<std::string> tokens;
  for (const auto& f : ctx) {
    switch (f.kind) {
      case sanscan::FrameKind::JsString:
        tokens.insert(f.quote == sanscan::QuoteKind::Single ? "'" : "\"");
        break;
      case sanscan::FrameKind::JsCode:
        tokens.insert(")");
        tokens.insert(";");
        break;
      case sanscan::FrameKind::JsLineComment: tokens.insert("\n"); break;
      case sanscan::FrameKind::JsBlockComment: tokens.insert("*/"); break;
      case sanscan::FrameKind::AttrValue:
        switch (f.quote) {
          case sanscan::QuoteKind::Double:
            tokens.insert("\"");
            tokens.insert("\" onclick=\"");
            break;
          case sanscan::QuoteKind::Single:
            tokens.insert("'");
            tokens.insert("' onclick='");
            break;
          case sanscan::QuoteKind::Unquoted:
            tokens.insert("x onclick=");
            break;
        }
        tokens.insert(">");
        if (f.attr_class == sanscan::AttrClass::Url) {
          tokens.insert("javascript:");
        }
        break;
      case sanscan::FrameKind::Tag: tokens.insert(">"); break;
      case sanscan::FrameKind::ScriptData: tokens.insert("</script>"); break;
      case sanscan::FrameKind::StyleData: tokens.insert("</style>"); break;
      case sanscan::FrameKind::HtmlComment: tokens.insert("-->"); break;
      case sanscan::FrameKind::HtmlData:
      case sanscan::FrameKind::UrlScheme:
        break;
    }
  }
  tokens.insert("<script>");
  tokens.insert("</script>");
  std::vector<std::string> out;
  // quote/paren/semicolon first so short breakouts are found early
  for (const char* t : {"'", "\"", ")", ";"}) {
    if (tokens.erase(t)) out.push_back(t);
  }
  out.insert(out.end(), tokens.begin(), tokens.end());
  return out;
}

// Unrestricted enumeration: every pre of at most `max_pre` tokens (any
// order, repetition allowed) and every post of at most `max_post` tokens
// drawn from the alphabet plus "//", around the canary call. True as
// soon as any candidate passes verify_true_attack.
inline bool brute_force_attack_exists(const sanscan::InjectionPoint& ip,
                                      const std::string& canary,
                                      int max_pre = 3, int max_post = 2) {
  std::vector<std::string> pres = brute_alphabet(ip.context);
  std::vector<std::string> posts = pres;
  posts.push_back("//");
  std::string payload = canary + "(1);";

  std::vector<std::string> pre_strings{""};
  std::vector<std::string> frontier{""};
  for (int n = 0; n < max_pre; ++n) {
    std::vector<std::string> next;
    for (const auto& base : frontier) {
      for (const auto& t : pres) next.push_back(base + t);
    }
    pre_strings.insert(pre_strings.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::vector<std::string> post_strings{""};
  frontier = {""};
  for (int n = 0; n < max_post; ++n) {
    std::vector<std::string> next;
    for (const auto& base : frontier) {
      for (const auto& t : posts) next.push_back(base + t);
    }
    post_strings.insert(post_strings.end(), next.begin(), next.end());
    frontier = std::move(next);
  }

  for (const auto& pre : pre_strings) {
    for (const auto& post : post_strings) {
      sanscan::AttackVector v{pre, payload, post, pre + payload + post};
      if (sanscan::verify_true_attack(ip, v, canary)) return true;
    }
  }
  return false;
}

}  // namespace oracles
