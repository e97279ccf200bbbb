#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sanscan/browser_model.hpp"
#include "sanscan/context.hpp"
#include "sanscan/errors.hpp"
#include "sanscan/html_scanner.hpp"
#include "sanscan/template_doc.hpp"

namespace sanscan {

// A sink rendered into a concrete document with a unique marker, plus
// everything the generator needs to know about where that marker sits.
struct InjectionPoint {
  std::string file_id;
  int sink_index = 0;
  std::string skeleton;       // all other sinks empty, marker at this one
  std::string marker;         // 16 chars of [A-Z0-9]
  std::size_t marker_offset = 0;
  ContextStack context;       // at the sink in the all-empty rendering
  std::string left_constraint;   // enclosing element start .. marker
  std::string right_constraint;  // marker .. enclosing element end
};

struct AttackVector {
  std::string pre_escape;
  std::string payload;
  std::string post_escape;
  std::string full;
};

inline std::string substitute(const InjectionPoint& ip,
                              std::string_view value) {
  std::string out;
  out.reserve(ip.skeleton.size() + value.size());
  out.append(ip.skeleton, 0, ip.marker_offset);
  out.append(value);
  out.append(ip.skeleton, ip.marker_offset + ip.marker.size(),
             std::string::npos);
  return out;
}

using MarkerGen = std::function<std::string(int attempt)>;

inline MarkerGen default_marker_gen(const std::string& file_id,
                                    int sink_index) {
  std::uint64_t seed =
      std::hash<std::string>{}(file_id) * 1000003u +
      static_cast<std::uint64_t>(sink_index) + 0x5eed;
  return [seed](int attempt) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt) * 7919);
    std::uniform_int_distribution<int> pick(0, 35);
    std::string m;
    for (int i = 0; i < 16; ++i) m += kAlphabet[pick(rng)];
    return m;
  };
}

inline InjectionPoint infer_injection_point(const TemplateDoc& doc,
                                            int sink_index,
                                            const MarkerGen& marker_gen) {
  auto sinks = locate_sinks(doc);
  auto it = std::find_if(sinks.begin(), sinks.end(),
                         [&](const auto& p) { return p.first == sink_index; });
  if (it == sinks.end()) {
    throw Error("no such sink: " + std::to_string(sink_index));
  }
  std::size_t offset = it->second;

  InjectionPoint ip;
  ip.file_id = doc.file_id;
  ip.sink_index = sink_index;
  ip.context = context_at(render_empty(doc), offset);
  ip.marker_offset = offset;

  std::map<int, std::string> values;
  for (const auto& seg : doc.segments) {
    if (seg.kind == SegmentKind::Sink) values[seg.sink_index] = "";
  }
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string marker = marker_gen(attempt);
    values[sink_index] = marker;
    std::string skel = render(doc, values);
    bool once = skel.find(marker) == offset &&
                skel.find(marker, offset + 1) == std::string::npos;
    if (!once || doc.source.find(marker) != std::string::npos) continue;
    ip.marker = std::move(marker);
    ip.skeleton = std::move(skel);
    HtmlScanner scan(ip.skeleton);
    ElementSpan elem = scan.enclosing_element(offset);
    std::size_t after = std::min(offset + ip.marker.size(), ip.skeleton.size());
    std::size_t end = std::max(elem.end, after);
    ip.left_constraint = ip.skeleton.substr(elem.begin, offset - elem.begin);
    ip.right_constraint = ip.skeleton.substr(after, end - after);
    return ip;
  }
  throw MarkerCollision();
}

inline InjectionPoint infer_injection_point(const TemplateDoc& doc,
                                            int sink_index) {
  return infer_injection_point(doc, sink_index,
                               default_marker_gen(doc.file_id, sink_index));
}

inline bool verify_true_attack(const InjectionPoint& ip, const AttackVector& v,
                               const std::string& canary) {
  return any_canary_fires(substitute(ip, v.full), canary);
}

namespace atkdetail {

enum class PosKind {
  HtmlData,
  TagInterior,
  AttrValue,
  UrlScheme,
  ScriptData,
  StyleData,
  HtmlComment,
  JsCode,
  JsString,
  JsLineComment,
  JsBlockComment,
};

struct Pos {
  PosKind kind;
  AttrClass attr_class = AttrClass::Plain;
  QuoteKind quote = QuoteKind::Double;
};

inline std::vector<Pos> build_positions(const ContextStack& ctx) {
  std::vector<Pos> out;
  for (const auto& f : ctx) {
    switch (f.kind) {
      case FrameKind::HtmlData: out.push_back({PosKind::HtmlData}); break;
      case FrameKind::Tag: out.push_back({PosKind::TagInterior}); break;
      case FrameKind::AttrValue:
        out.push_back({PosKind::TagInterior});
        out.push_back({PosKind::AttrValue, f.attr_class, f.quote});
        break;
      case FrameKind::ScriptData: out.push_back({PosKind::ScriptData}); break;
      case FrameKind::StyleData: out.push_back({PosKind::StyleData}); break;
      case FrameKind::HtmlComment:
        out.push_back({PosKind::HtmlComment});
        break;
      case FrameKind::UrlScheme: out.push_back({PosKind::UrlScheme}); break;
      case FrameKind::JsCode: out.push_back({PosKind::JsCode}); break;
      case FrameKind::JsString:
        out.push_back({PosKind::JsString, AttrClass::Plain, f.quote});
        break;
      case FrameKind::JsLineComment:
        out.push_back({PosKind::JsLineComment});
        break;
      case FrameKind::JsBlockComment:
        out.push_back({PosKind::JsBlockComment});
        break;
    }
  }
  return out;
}

struct TokenMove {
  std::string text;
  int target;  // position index after emitting the token
};

// Closing tokens a position contributes, with the position they lead to.
inline std::vector<TokenMove> tokens_for(const std::vector<Pos>& ps, int idx) {
  const Pos& p = ps[static_cast<std::size_t>(idx)];
  switch (p.kind) {
    case PosKind::JsString:
      return {{p.quote == QuoteKind::Single ? "'" : "\"", idx - 1}};
    case PosKind::JsLineComment: return {{"\n", idx - 1}};
    case PosKind::JsBlockComment: return {{"*/", idx - 1}};
    case PosKind::JsCode: return {{")", idx}, {";", idx}};
    case PosKind::AttrValue:
      switch (p.quote) {
        case QuoteKind::Double: return {{"\"", idx - 1}};
        case QuoteKind::Single: return {{"'", idx - 1}};
        case QuoteKind::Unquoted: return {{" ", idx - 1}};
      }
      return {};
    case PosKind::TagInterior: return {{">", idx - 1}};
    case PosKind::ScriptData: return {{"</script>", idx - 1}};
    case PosKind::StyleData: return {{"</style>", idx - 1}};
    case PosKind::HtmlComment: return {{"-->", idx - 1}};
    case PosKind::UrlScheme:
    case PosKind::HtmlData: return {};
  }
  return {};
}

inline std::string mirror_of(const std::vector<std::string>& tokens) {
  std::string out;
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (*it == "'" || *it == "\"") {
      out += *it;
    } else if (*it == ")") {
      out += "(";
    }
  }
  return out;
}

inline std::string encode_meta(std::string_view s, bool percent) {
  static constexpr std::string_view kMeta = "&<>\"'();/";
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    if (kMeta.find(c) != std::string_view::npos) {
      if (percent) {
        unsigned char b = static_cast<unsigned char>(c);
        out += '%';
        out += kHex[b >> 4];
        out += kHex[b & 0xF];
      } else {
        out += "&#" + std::to_string(static_cast<int>(c)) + ";";
      }
    } else {
      out += c;
    }
  }
  return out;
}

struct CandidateSink {
  std::vector<AttackVector> list;
  bool url_context = false;

  void add(std::string pre, std::string payload, std::string post) {
    AttackVector raw{pre, payload, post, pre + payload + post};
    list.push_back(std::move(raw));
    AttackVector ent{encode_meta(pre, false), encode_meta(payload, false),
                     encode_meta(post, false), ""};
    ent.full = ent.pre_escape + ent.payload + ent.post_escape;
    list.push_back(std::move(ent));
    if (url_context) {
      AttackVector pct{encode_meta(pre, true), encode_meta(payload, true),
                       encode_meta(post, true), ""};
      pct.full = pct.pre_escape + pct.payload + pct.post_escape;
      list.push_back(std::move(pct));
    }
  }
};

inline void walk(const std::vector<Pos>& ps, int idx, int used, int depth,
                 std::vector<std::string>& tokens, std::string& pre,
                 const std::string& payload, CandidateSink& sink) {
  const Pos& p = ps[static_cast<std::size_t>(idx)];

  if (p.kind == PosKind::JsCode) {
    sink.add(pre, payload, "//");
    sink.add(pre, payload, "");
    std::string mirror = mirror_of(tokens);
    if (!mirror.empty()) sink.add(pre, payload, mirror);
  }
  if (used < depth) {
    if (p.kind == PosKind::HtmlData) {
      sink.add(pre + "<script>", payload, "</script>");
    }
    if (p.kind == PosKind::AttrValue) {
      std::string form;
      switch (p.quote) {
        case QuoteKind::Double: form = "\" onclick=\""; break;
        case QuoteKind::Single: form = "' onclick='"; break;
        case QuoteKind::Unquoted: form = "x onclick="; break;
      }
      sink.add(pre + form, payload, "//");
      sink.add(pre + form, payload, "");
      if (p.attr_class == AttrClass::Url) {
        sink.add(pre + "javascript:", payload, "//");
        sink.add(pre + "javascript:", payload, "");
      }
    }
  }

  if (used >= depth) return;
  // Tokens from the current position or any position further out; a
  // candidate never emits an inner frame's closer after an outer one.
  for (int j = idx; j >= 0; --j) {
    for (const auto& mv : tokens_for(ps, j)) {
      pre += mv.text;
      tokens.push_back(mv.text);
      walk(ps, mv.target, used + 1, depth, tokens, pre, payload, sink);
      tokens.pop_back();
      pre.resize(pre.size() - mv.text.size());
    }
  }
}

}  // namespace atkdetail

// Grammar-directed bounded search for attack vectors: emit closing-token
// sequences walking the context stack innermost to outermost, place the
// canary payload wherever JS code is reached, add context-switching forms
// for non-executable positions, expand transduction-encoded variants, and
// keep only candidates the browser model confirms against the
// unsanitized skeleton. Shortest candidates come back first.
inline std::vector<AttackVector> generate_vectors(const InjectionPoint& ip,
                                                  const std::string& canary,
                                                  int depth = 3,
                                                  int candidate_cap = 10000) {
  std::vector<atkdetail::Pos> ps = atkdetail::build_positions(ip.context);
  atkdetail::CandidateSink sink;
  for (const auto& f : ip.context) {
    if (f.kind == FrameKind::UrlScheme ||
        (f.kind == FrameKind::AttrValue && f.attr_class == AttrClass::Url)) {
      sink.url_context = true;
    }
  }
  std::string payload = canary + "(1);";
  std::vector<std::string> tokens;
  std::string pre;
  atkdetail::walk(ps, static_cast<int>(ps.size()) - 1, 0, depth, tokens, pre,
                  payload, sink);

  // Deduplicate by full string, keeping generation order, then order
  // shortest-first (stable, so the generation order breaks ties).
  std::vector<AttackVector> unique;
  for (auto& v : sink.list) {
    bool seen = false;
    for (const auto& u : unique) {
      if (u.full == v.full) {
        seen = true;
        break;
      }
    }
    if (!seen) unique.push_back(std::move(v));
  }
  std::stable_sort(unique.begin(), unique.end(),
                   [](const AttackVector& a, const AttackVector& b) {
                     return a.full.size() < b.full.size();
                   });
  if (unique.size() > static_cast<std::size_t>(candidate_cap)) {
    unique.resize(static_cast<std::size_t>(candidate_cap));
  }

  std::vector<AttackVector> verified;
  for (const auto& v : unique) {
    if (verify_true_attack(ip, v, canary)) verified.push_back(v);
  }
  return verified;
}

}  // namespace sanscan
