#pragma once

#include <string>
#include <vector>

namespace sanscan {

enum class FrameKind {
  HtmlData,
  Tag,
  AttrValue,
  ScriptData,
  StyleData,
  HtmlComment,
  JsCode,
  JsString,
  JsLineComment,
  JsBlockComment,
  UrlScheme,
};

enum class AttrClass { Plain, EventHandler, Url, Style };
enum class QuoteKind { Double, Single, Unquoted };

struct ContextFrame {
  FrameKind kind = FrameKind::HtmlData;
  std::string name;  // tag name / attribute name / URL scheme
  AttrClass attr_class = AttrClass::Plain;
  QuoteKind quote = QuoteKind::Double;  // AttrValue and JsString

  bool operator==(const ContextFrame&) const = default;

  static ContextFrame html_data() { return {FrameKind::HtmlData, {}, {}, {}}; }
  static ContextFrame tag(std::string name) {
    return {FrameKind::Tag, std::move(name), {}, {}};
  }
  static ContextFrame attr_value(std::string attr, AttrClass cls,
                                 QuoteKind q) {
    return {FrameKind::AttrValue, std::move(attr), cls, q};
  }
  static ContextFrame script_data() {
    return {FrameKind::ScriptData, {}, {}, {}};
  }
  static ContextFrame style_data() { return {FrameKind::StyleData, {}, {}, {}}; }
  static ContextFrame html_comment() {
    return {FrameKind::HtmlComment, {}, {}, {}};
  }
  static ContextFrame js_code() { return {FrameKind::JsCode, {}, {}, {}}; }
  static ContextFrame js_string(QuoteKind q) {
    return {FrameKind::JsString, {}, {}, q};
  }
  static ContextFrame js_line_comment() {
    return {FrameKind::JsLineComment, {}, {}, {}};
  }
  static ContextFrame js_block_comment() {
    return {FrameKind::JsBlockComment, {}, {}, {}};
  }
  static ContextFrame url_scheme(std::string scheme) {
    return {FrameKind::UrlScheme, std::move(scheme), {}, {}};
  }
};

// Ordered outermost-to-innermost; frames[0] is always HtmlData.
using ContextStack = std::vector<ContextFrame>;

inline std::string to_string(const ContextFrame& f) {
  auto quote_name = [](QuoteKind q) {
    switch (q) {
      case QuoteKind::Double: return "Double";
      case QuoteKind::Single: return "Single";
      case QuoteKind::Unquoted: return "Unquoted";
    }
    return "";
  };
  switch (f.kind) {
    case FrameKind::HtmlData: return "HtmlData";
    case FrameKind::Tag: return "Tag(" + f.name + ")";
    case FrameKind::AttrValue: {
      const char* cls = "Plain";
      switch (f.attr_class) {
        case AttrClass::Plain: cls = "Plain"; break;
        case AttrClass::EventHandler: cls = "EventHandler"; break;
        case AttrClass::Url: cls = "Url"; break;
        case AttrClass::Style: cls = "Style"; break;
      }
      return "AttrValue(" + f.name + "," + cls + "," + quote_name(f.quote) +
             ")";
    }
    case FrameKind::ScriptData: return "ScriptData";
    case FrameKind::StyleData: return "StyleData";
    case FrameKind::HtmlComment: return "HtmlComment";
    case FrameKind::JsCode: return "JsCode";
    case FrameKind::JsString:
      return std::string("JsString(") + quote_name(f.quote) + ")";
    case FrameKind::JsLineComment: return "JsLineComment";
    case FrameKind::JsBlockComment: return "JsBlockComment";
    case FrameKind::UrlScheme: return "UrlScheme(" + f.name + ")";
  }
  return "";
}

inline std::string to_string(const ContextStack& stack) {
  std::string out;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (i) out += " > ";
    out += to_string(stack[i]);
  }
  return out;
}

}  // namespace sanscan
