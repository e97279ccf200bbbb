#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sanscan/context.hpp"
#include "sanscan/errors.hpp"
#include "sanscan/js_parser.hpp"
#include "sanscan/transduction.hpp"

namespace sanscan {

inline AttrClass classify_attr(std::string_view name_lower) {
  if (name_lower.size() >= 2 && name_lower[0] == 'o' && name_lower[1] == 'n') {
    return AttrClass::EventHandler;
  }
  if (name_lower == "href" || name_lower == "src" || name_lower == "action" ||
      name_lower == "formaction") {
    return AttrClass::Url;
  }
  if (name_lower == "style") return AttrClass::Style;
  return AttrClass::Plain;
}

namespace htmldetail {

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

inline bool is_alpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool ci_starts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[i]) != ascii_lower(prefix[i])) return false;
  }
  return true;
}

inline bool is_void_element(std::string_view name) {
  static constexpr std::string_view kVoid[] = {
      "area", "base", "br",    "col",   "embed", "hr",  "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(std::begin(kVoid), std::end(kVoid), name) != std::end(kVoid);
}

}  // namespace htmldetail

// An attribute occurrence seen by the scanner. Values are raw source
// text; transduction decoding happens in the callers.
struct AttrOccurrence {
  std::string tag;    // lowercased owner tag name
  std::string name;   // lowercased attribute name
  std::string value;  // raw, undecoded
  QuoteKind quote = QuoteKind::Double;
  bool in_end_tag = false;
  std::size_t value_start = 0;  // offset of the first value byte
};

struct RawTextBody {
  std::string element;  // "script" or "style"
  std::size_t start = 0;
  std::size_t end = 0;
};

struct ElementSpan {
  std::size_t begin = 0;  // '<' of the start tag
  std::size_t end = 0;    // one past the element's last byte
};

// Reduced HTML tokenizer: the standard attribute-value states plus
// comments and raw-text <script>/<style> handling. No doctype, CDATA or
// foreign content. One instance scans one document.
class HtmlScanner {
 public:
  explicit HtmlScanner(std::string_view html) : html_(html) {
    scan_to(html_.size());
    finish_eof();
  }

  const std::vector<AttrOccurrence>& attrs() const { return attrs_; }
  const std::vector<RawTextBody>& raw_bodies() const { return raw_bodies_; }

  // Innermost element enclosing `offset`: the tag's own markup when the
  // offset is inside a start/end tag, otherwise the nearest containing
  // element, otherwise the whole document.
  ElementSpan enclosing_element(std::size_t offset) const {
    for (const auto& t : tag_spans_) {
      if (t.begin <= offset && offset < t.end) return t;
    }
    const ElementSpan* best = nullptr;
    for (const auto& e : element_spans_) {
      if (e.begin <= offset && offset < e.end) {
        if (!best || e.begin >= best->begin) best = &e;
      }
    }
    if (best) return *best;
    return {0, html_.size()};
  }

  // Context stack at a byte offset of `html`, 0 <= offset <= size.
  static ContextStack context_at(std::string_view html, std::size_t offset) {
    if (offset > html.size()) throw OffsetOutOfRange();
    HtmlScanner s(html, offset);
    return s.state_stack(offset);
  }

 private:
  enum class State {
    Data,
    TagName,
    EndTagOpen,
    EndTagName,
    EndTagRest,
    BeforeAttrName,
    AttrName,
    AfterAttrName,
    BeforeAttrValue,
    AttrValueDouble,
    AttrValueSingle,
    AttrValueUnquoted,
    AfterAttrValueQuoted,
    SelfClosingStart,
    MarkupDeclOpen,
    MarkupDeclDash,
    Comment,
    CommentDash,
    CommentDashDash,
    BogusComment,
    RawText,
    RawTextClose,
  };

  struct OpenElement {
    std::string name;
    std::size_t lt = 0;
  };

  HtmlScanner(std::string_view html, std::size_t stop) : html_(html) {
    scan_to(stop);
  }

  void scan_to(std::size_t stop) {
    while (pos_ < stop) {
      step(html_[pos_]);
      ++pos_;
    }
  }

  char peek(std::size_t ahead = 1) const {
    return pos_ + ahead < html_.size() ? html_[pos_ + ahead] : '\0';
  }

  void step(char c) {
    using htmldetail::ascii_lower;
    using htmldetail::is_alpha;
    using htmldetail::is_ws;
    switch (state_) {
      case State::Data:
        if (c == '<') {
          char p = peek();
          if (is_alpha(p)) {
            begin_tag(false);
          } else if (p == '/') {
            state_ = State::EndTagOpen;
            tag_lt_ = pos_;
          } else if (p == '!') {
            state_ = State::MarkupDeclOpen;
            tag_lt_ = pos_;
          } else if (p == '?') {
            state_ = State::BogusComment;
            tag_lt_ = pos_;
          }
          // otherwise literal '<', stay in Data
        }
        break;

      case State::EndTagOpen:  // consuming the '/'
        state_ = State::EndTagName;
        tag_name_.clear();
        in_end_tag_ = true;
        break;

      case State::TagName:
        if (is_ws(c)) {
          state_ = State::BeforeAttrName;
        } else if (c == '/') {
          state_ = State::SelfClosingStart;
        } else if (c == '>') {
          finish_start_tag(false);
        } else {
          tag_name_ += ascii_lower(c);
        }
        break;

      case State::EndTagName:
        if (c == '>') {
          finish_end_tag();
        } else if (is_ws(c)) {
          state_ = State::EndTagRest;
        } else {
          tag_name_ += ascii_lower(c);
        }
        break;

      case State::EndTagRest:
        if (c == '>') finish_end_tag();
        break;

      case State::BeforeAttrName:
        if (is_ws(c)) break;
        if (c == '/') {
          state_ = State::SelfClosingStart;
        } else if (c == '>') {
          finish_start_tag(false);
        } else {
          attr_name_.assign(1, ascii_lower(c));
          state_ = State::AttrName;
        }
        break;

      case State::AttrName:
        if (is_ws(c)) {
          state_ = State::AfterAttrName;
        } else if (c == '=') {
          state_ = State::BeforeAttrValue;
        } else if (c == '>') {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          finish_start_tag(false);
        } else if (c == '/') {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          state_ = State::SelfClosingStart;
        } else {
          attr_name_ += ascii_lower(c);
        }
        break;

      case State::AfterAttrName:
        if (is_ws(c)) break;
        if (c == '=') {
          state_ = State::BeforeAttrValue;
        } else if (c == '>') {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          finish_start_tag(false);
        } else if (c == '/') {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          state_ = State::SelfClosingStart;
        } else {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          attr_name_.assign(1, ascii_lower(c));
          state_ = State::AttrName;
        }
        break;

      case State::BeforeAttrValue:
        if (is_ws(c)) break;
        if (c == '"') {
          state_ = State::AttrValueDouble;
          value_start_ = pos_ + 1;
        } else if (c == '\'') {
          state_ = State::AttrValueSingle;
          value_start_ = pos_ + 1;
        } else if (c == '>') {
          emit_attr(QuoteKind::Unquoted, pos_, pos_);
          finish_start_tag(false);
        } else {
          state_ = State::AttrValueUnquoted;
          value_start_ = pos_;
        }
        break;

      case State::AttrValueDouble:
        if (c == '"') {
          emit_attr(QuoteKind::Double, value_start_, pos_);
          state_ = State::AfterAttrValueQuoted;
        }
        break;

      case State::AttrValueSingle:
        if (c == '\'') {
          emit_attr(QuoteKind::Single, value_start_, pos_);
          state_ = State::AfterAttrValueQuoted;
        }
        break;

      case State::AttrValueUnquoted:
        if (is_ws(c)) {
          emit_attr(QuoteKind::Unquoted, value_start_, pos_);
          state_ = State::BeforeAttrName;
        } else if (c == '>') {
          emit_attr(QuoteKind::Unquoted, value_start_, pos_);
          finish_start_tag(false);
        }
        break;

      case State::AfterAttrValueQuoted:
        if (is_ws(c)) {
          state_ = State::BeforeAttrName;
        } else if (c == '/') {
          state_ = State::SelfClosingStart;
        } else if (c == '>') {
          finish_start_tag(false);
        } else {
          attr_name_.assign(1, ascii_lower(c));
          state_ = State::AttrName;
        }
        break;

      case State::SelfClosingStart:
        if (c == '>') {
          finish_start_tag(true);
        } else if (htmldetail::is_ws(c)) {
          state_ = State::BeforeAttrName;
        } else {
          attr_name_.assign(1, ascii_lower(c));
          state_ = State::AttrName;
        }
        break;

      case State::MarkupDeclOpen:  // consuming the '!'
        state_ = State::MarkupDeclDash;
        break;

      case State::MarkupDeclDash:
        state_ = (c == '-' && peek() == '-') ? State::CommentDash
                                             : State::BogusComment;
        // CommentDash here consumes the second '-' next step
        break;

      case State::CommentDash:
        if (!comment_open_) {
          comment_open_ = true;  // second '-' of "<!--"
          state_ = State::Comment;
          break;
        }
        state_ = (c == '-') ? State::CommentDashDash : State::Comment;
        break;

      case State::Comment:
        if (c == '-') state_ = State::CommentDash;
        break;

      case State::CommentDashDash:
        if (c == '>') {
          state_ = State::Data;
          comment_open_ = false;
        } else if (c != '-') {
          state_ = State::Comment;
        }
        break;

      case State::BogusComment:
        if (c == '>') state_ = State::Data;
        break;

      case State::RawText:
        if (c == '<' && raw_close_matches()) {
          raw_bodies_.push_back({raw_name_, raw_body_start_, pos_});
          state_ = State::RawTextClose;
        }
        break;

      case State::RawTextClose:
        if (c == '>') {
          element_spans_.push_back({raw_lt_, pos_ + 1});
          state_ = State::Data;
        }
        break;
    }
  }

  bool raw_close_matches() const {
    std::string target = "</" + raw_name_;
    std::string_view rest = html_.substr(pos_);
    if (!htmldetail::ci_starts_with(rest, target)) return false;
    if (rest.size() == target.size()) return true;
    char after = rest[target.size()];
    return after == '>' || after == '/' || htmldetail::is_ws(after);
  }

  void begin_tag(bool end_tag) {
    state_ = State::TagName;
    tag_name_.clear();
    in_end_tag_ = end_tag;
    tag_lt_ = pos_;
  }

  void emit_attr(QuoteKind quote, std::size_t vstart, std::size_t vend) {
    if (attr_name_.empty()) return;
    attrs_.push_back({tag_name_, attr_name_,
                      std::string(html_.substr(vstart, vend - vstart)), quote,
                      in_end_tag_, vstart});
    attr_name_.clear();
  }

  void finish_start_tag(bool self_closing) {
    tag_spans_.push_back({tag_lt_, pos_ + 1});
    if (tag_name_ == "script" || tag_name_ == "style") {
      state_ = State::RawText;
      raw_name_ = tag_name_;
      raw_body_start_ = pos_ + 1;
      raw_lt_ = tag_lt_;
      return;
    }
    if (self_closing || htmldetail::is_void_element(tag_name_)) {
      element_spans_.push_back({tag_lt_, pos_ + 1});
    } else {
      open_.push_back({tag_name_, tag_lt_});
    }
    state_ = State::Data;
  }

  void finish_end_tag() {
    tag_spans_.push_back({tag_lt_, pos_ + 1});
    for (std::size_t i = open_.size(); i-- > 0;) {
      if (open_[i].name == tag_name_) {
        element_spans_.push_back({open_[i].lt, pos_ + 1});
        // anything left open above gets implicitly closed here
        for (std::size_t j = open_.size(); j-- > i + 1;) {
          element_spans_.push_back({open_[j].lt, tag_lt_});
        }
        open_.resize(i);
        break;
      }
    }
    in_end_tag_ = false;
    state_ = State::Data;
  }

  void finish_eof() {
    if (state_ == State::RawText) {
      raw_bodies_.push_back({raw_name_, raw_body_start_, html_.size()});
      element_spans_.push_back({raw_lt_, html_.size()});
    }
    for (const auto& oe : open_) {
      element_spans_.push_back({oe.lt, html_.size()});
    }
  }

  // Maps the machine state after `offset` consumed bytes to a context
  // stack, extending into JS frames where a JS interpreter would take
  // over.
  ContextStack state_stack(std::size_t offset) const {
    ContextStack stack{ContextFrame::html_data()};
    switch (state_) {
      case State::Data:
        break;
      case State::MarkupDeclOpen:
      case State::MarkupDeclDash:
      case State::Comment:
      case State::CommentDash:
      case State::CommentDashDash:
      case State::BogusComment:
        stack.push_back(ContextFrame::html_comment());
        break;
      case State::TagName:
      case State::EndTagOpen:
      case State::EndTagName:
      case State::EndTagRest:
      case State::BeforeAttrName:
      case State::AttrName:
      case State::AfterAttrName:
      case State::AfterAttrValueQuoted:
      case State::SelfClosingStart:
      case State::RawTextClose:
        stack.push_back(ContextFrame::tag(
            state_ == State::RawTextClose ? raw_name_ : tag_name_));
        break;
      // Text inserted right after '=' becomes an unquoted value, so the
      // before-value boundary already carries the attribute context.
      case State::BeforeAttrValue:
      case State::AttrValueDouble:
      case State::AttrValueSingle:
      case State::AttrValueUnquoted: {
        QuoteKind q = state_ == State::AttrValueDouble  ? QuoteKind::Double
                      : state_ == State::AttrValueSingle ? QuoteKind::Single
                                                         : QuoteKind::Unquoted;
        AttrClass cls = classify_attr(attr_name_);
        stack.push_back(ContextFrame::attr_value(attr_name_, cls, q));
        std::string_view raw =
            state_ == State::BeforeAttrValue
                ? std::string_view{}
                : html_.substr(value_start_, offset - value_start_);
        if (cls == AttrClass::EventHandler) {
          extend_js(stack, decode_entities(raw));
        } else if (cls == AttrClass::Url) {
          extend_url(stack, decode_entities(raw));
        }
        break;
      }
      case State::RawText:
        if (raw_name_ == "script") {
          stack.push_back(ContextFrame::script_data());
          extend_js(stack, std::string(html_.substr(
                               raw_body_start_, offset - raw_body_start_)));
        } else {
          stack.push_back(ContextFrame::style_data());
        }
        break;
    }
    return stack;
  }

  static void extend_js(ContextStack& stack, std::string_view program_prefix) {
    stack.push_back(ContextFrame::js_code());
    JsEndState st = js_scan_mode(program_prefix);
    switch (st.mode) {
      case JsEndMode::Code: break;
      case JsEndMode::String:
        stack.push_back(ContextFrame::js_string(
            st.quote == '\'' ? QuoteKind::Single : QuoteKind::Double));
        break;
      case JsEndMode::LineComment:
        stack.push_back(ContextFrame::js_line_comment());
        break;
      case JsEndMode::BlockComment:
        stack.push_back(ContextFrame::js_block_comment());
        break;
    }
  }

  static void extend_url(ContextStack& stack, std::string_view decoded_value) {
    std::string stripped = strip_ws_ctl(decoded_value);
    if (htmldetail::ci_starts_with(stripped, "javascript:")) {
      stack.push_back(ContextFrame::url_scheme("javascript"));
      extend_js(stack, percent_decode(
                           std::string_view(stripped).substr(11)));
      return;
    }
    // Some other complete scheme: record it, no executable frame.
    if (!stripped.empty() && htmldetail::is_alpha(stripped[0])) {
      for (std::size_t i = 1; i < stripped.size(); ++i) {
        char c = stripped[i];
        if (c == ':') {
          std::string scheme = stripped.substr(0, i);
          for (char& ch : scheme) ch = htmldetail::ascii_lower(ch);
          stack.push_back(ContextFrame::url_scheme(scheme));
          return;
        }
        bool scheme_char = htmldetail::is_alpha(c) ||
                           (c >= '0' && c <= '9') || c == '+' || c == '.' ||
                           c == '-';
        if (!scheme_char) return;
      }
    }
  }

  std::string_view html_;
  std::size_t pos_ = 0;
  State state_ = State::Data;

  std::string tag_name_;
  std::string attr_name_;
  bool in_end_tag_ = false;
  bool comment_open_ = false;
  std::size_t tag_lt_ = 0;
  std::size_t value_start_ = 0;

  std::string raw_name_;
  std::size_t raw_body_start_ = 0;
  std::size_t raw_lt_ = 0;

  std::vector<OpenElement> open_;
  std::vector<AttrOccurrence> attrs_;
  std::vector<RawTextBody> raw_bodies_;
  std::vector<ElementSpan> tag_spans_;
  std::vector<ElementSpan> element_spans_;
};

}  // namespace sanscan
