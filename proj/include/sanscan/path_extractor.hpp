#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sanscan/attack_gen.hpp"
#include "sanscan/context.hpp"
#include "sanscan/errors.hpp"
#include "sanscan/sanitizers.hpp"
#include "sanscan/template_doc.hpp"

namespace sanscan {

// One source -> ordered sanitizer chain -> sink flow along one
// control-flow path. Sanitizer ids are registry ids, in applied order.
struct SanitizationPath {
  std::string source_id;
  std::vector<std::string> sanitizers;
  int sink_index = 0;
  std::string file_id;
  std::vector<Span> flow_trace;
};

struct TestCaseSpec {
  SanitizationPath representative;
  std::vector<SanitizationPath> merged_from;
  ContextStack context;
  std::optional<InjectionPoint> injection_point;  // filled by attack-gen
};

namespace taintdetail {

struct Taint {
  std::string source_id;
  std::vector<std::string> chain;
  std::vector<Span> trace;
};

// Trace spans are reporting detail; two taints with the same source and
// chain are the same taint.
inline bool same_taint(const Taint& a, const Taint& b) {
  return a.source_id == b.source_id && a.chain == b.chain;
}

using TaintSet = std::vector<Taint>;
using Env = std::map<std::string, TaintSet>;

inline bool same_set(const TaintSet& a, const TaintSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_taint(a[i], b[i])) return false;
  }
  return true;
}

inline bool same_env(const Env& a, const Env& b) {
  if (a.size() != b.size()) return false;
  auto ia = a.begin();
  auto ib = b.begin();
  for (; ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !same_set(ia->second, ib->second)) {
      return false;
    }
  }
  return true;
}

template <typename T, typename Eq>
void dedupe(std::vector<T>& xs, Eq eq) {
  std::vector<T> out;
  for (auto& x : xs) {
    bool seen = false;
    for (const auto& y : out) {
      if (eq(x, y)) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(x));
  }
  xs = std::move(out);
}

constexpr std::size_t kMaxPaths = 4096;
constexpr int kMaxInlineDepth = 8;

class Extractor {
 public:
  Extractor(const TemplateDoc& doc, const SanitizerRegistry& registry)
      : doc_(doc), registry_(registry) {}

  std::vector<SanitizationPath> run() {
    std::vector<Env> envs{Env{}};
    std::vector<SanitizationPath> paths;
    for (const auto& seg : doc_.segments) {
      switch (seg.kind) {
        case SegmentKind::Literal: break;
        case SegmentKind::Directive:
          for (const auto& st : seg.stmts) envs = step_stmt(st, envs, 0);
          break;
        case SegmentKind::Sink:
          for (const auto& env : envs) {
            for (const auto& variant : eval(seg.sink_expr, env, 0)) {
              for (const auto& taint : variant) {
                SanitizationPath p;
                p.source_id = taint.source_id;
                p.sanitizers = taint.chain;
                p.sink_index = seg.sink_index;
                p.file_id = doc_.file_id;
                p.flow_trace = taint.trace;
                p.flow_trace.push_back(seg.span);
                paths.push_back(std::move(p));
                if (paths.size() > kMaxPaths) throw PathExplosion(kMaxPaths);
              }
            }
          }
          break;
      }
    }
    return paths;
  }

 private:
  // Taint of an expression under one environment. Functions are inlined,
  // and an if inside a function body forks the result, so the return
  // value is a list of possible taint sets, one per internal control
  // path.
  std::vector<TaintSet> eval(const ExprPtr& e, const Env& env, int depth) {
    switch (e->kind) {
      case ExprKind::Str: return {TaintSet{}};
      case ExprKind::Source: {
        Taint t;
        t.source_id = e->name;
        t.trace = {e->span};
        return {TaintSet{std::move(t)}};
      }
      case ExprKind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) return {TaintSet{}};  // unbound: untainted
        return {it->second};
      }
      case ExprKind::Concat: {
        std::vector<TaintSet> acc{TaintSet{}};
        for (const auto& part : e->args) {
          std::vector<TaintSet> part_variants = eval(part, env, depth);
          std::vector<TaintSet> next;
          for (const auto& left : acc) {
            for (const auto& right : part_variants) {
              TaintSet joined = left;
              joined.insert(joined.end(), right.begin(), right.end());
              next.push_back(std::move(joined));
            }
          }
          acc = std::move(next);
          dedupe(acc, same_set);
        }
        return acc;
      }
      case ExprKind::Call:
        if (e->call_kind == CallKind::Sanitizer) {
          auto id = registry_.resolve(e->name);
          if (!id) throw UnknownCallee(e->name);
          std::vector<TaintSet> variants = eval(e->args[0], env, depth);
          for (auto& variant : variants) {
            for (auto& taint : variant) {
              taint.chain.push_back(*id);
              taint.trace.push_back(e->span);
            }
          }
          dedupe(variants, same_set);
          return variants;
        } else {
          auto it = doc_.functions.find(e->name);
          if (it == doc_.functions.end()) throw UnknownCallee(e->name);
          const FnDef& fn = *it->second;
          if (depth >= kMaxInlineDepth) throw InlineDepthExceeded(e->name);
          if (fn.params.size() != e->args.size()) {
            throw Error("function " + e->name + " expects " +
                        std::to_string(fn.params.size()) + " arguments, got " +
                        std::to_string(e->args.size()));
          }
          // Cartesian product over per-argument variants.
          std::vector<Env> locals{Env{}};
          for (std::size_t i = 0; i < fn.params.size(); ++i) {
            std::vector<TaintSet> arg_variants = eval(e->args[i], env, depth);
            std::vector<Env> next;
            for (const auto& local : locals) {
              for (const auto& variant : arg_variants) {
                Env ext = local;
                if (!variant.empty()) ext[fn.params[i]] = variant;
                next.push_back(std::move(ext));
              }
            }
            locals = std::move(next);
            dedupe(locals, same_env);
          }
          std::vector<Env> body_envs = std::move(locals);
          for (const auto& st : fn.body) {
            body_envs = step_stmt(st, body_envs, depth + 1);
          }
          std::vector<TaintSet> result;
          for (const auto& local : body_envs) {
            for (auto& variant : eval(fn.return_expr, local, depth + 1)) {
              result.push_back(std::move(variant));
            }
          }
          dedupe(result, same_set);
          if (result.size() > kMaxPaths) throw PathExplosion(kMaxPaths);
          return result;
        }
    }
    return {TaintSet{}};
  }

  std::vector<Env> step_stmt(const Stmt& st, const std::vector<Env>& envs,
                             int depth) {
    std::vector<Env> out;
    switch (st.kind) {
      case StmtKind::Assign:
        for (const auto& env : envs) {
          for (auto& variant : eval(st.expr, env, depth)) {
            Env next = env;  // strong update: re-assignment kills old taint
            if (variant.empty()) {
              next.erase(st.var);  // untainted binding == unbound
            } else {
              next[st.var] = std::move(variant);
            }
            out.push_back(std::move(next));
          }
        }
        break;
      case StmtKind::If: {
        std::vector<Env> then_envs = envs;
        for (const auto& s : st.then_branch) {
          then_envs = step_stmt(s, then_envs, depth);
        }
        std::vector<Env> else_envs = envs;
        for (const auto& s : st.else_branch) {
          else_envs = step_stmt(s, else_envs, depth);
        }
        out = std::move(then_envs);
        out.insert(out.end(), else_envs.begin(), else_envs.end());
        break;
      }
      case StmtKind::Expr:
        for (const auto& env : envs) eval(st.expr, env, depth);  // callee check
        out = envs;
        break;
      case StmtKind::Fn:
        out = envs;
        break;
    }
    dedupe(out, same_env);
    if (out.size() > kMaxPaths) throw PathExplosion(kMaxPaths);
    return out;
  }

  const TemplateDoc& doc_;
  const SanitizerRegistry& registry_;
};

}  // namespace taintdetail

// Enumerates every (source, sanitizer chain, sink) triple across all
// control-flow paths. Each if/else forks the environment set;
// environments that end up identical are folded, so only taint-relevant
// branches multiply paths.
inline std::vector<SanitizationPath> extract_paths(
    const TemplateDoc& doc, const SanitizerRegistry& registry) {
  taintdetail::Extractor ex(doc, registry);
  return ex.run();
}

// Paths are similar when their sanitizer chains and sink context stacks
// match; similar paths become one test case. Contexts are keyed by
// (file, sink) so corpora spanning several files merge correctly.
inline std::vector<TestCaseSpec> merge_similar(
    std::vector<SanitizationPath> paths,
    const std::map<std::pair<std::string, int>, ContextStack>& contexts) {
  auto first_span = [](const SanitizationPath& p) {
    return p.flow_trace.empty() ? std::size_t{0} : p.flow_trace.front().begin;
  };
  std::stable_sort(paths.begin(), paths.end(),
                   [&](const SanitizationPath& a, const SanitizationPath& b) {
                     if (a.file_id != b.file_id) return a.file_id < b.file_id;
                     if (first_span(a) != first_span(b)) {
                       return first_span(a) < first_span(b);
                     }
                     return a.sink_index < b.sink_index;
                   });

  std::vector<TestCaseSpec> out;
  std::vector<std::pair<std::vector<std::string>, std::string>> keys;
  for (auto& p : paths) {
    auto ctx_it = contexts.find({p.file_id, p.sink_index});
    if (ctx_it == contexts.end()) throw MissingContext(p.sink_index);
    std::pair<std::vector<std::string>, std::string> key{
        p.sanitizers, to_string(ctx_it->second)};
    bool found = false;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == key) {
        out[i].merged_from.push_back(p);
        found = true;
        break;
      }
    }
    if (!found) {
      TestCaseSpec tc;
      tc.representative = p;
      tc.merged_from = {p};
      tc.context = ctx_it->second;
      out.push_back(std::move(tc));
      keys.push_back(std::move(key));
    }
  }
  return out;
}

}  // namespace sanscan
