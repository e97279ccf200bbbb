#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sanscan/errors.hpp"

namespace sanscan {

enum class BuiltinKind {
  EscapeHtml,
  EscapeHtmlNoApos,
  EscapeJs,
  UrlEncode,
  ValidateAlnum,
  Identity,
};

// Character class parsed from a compact range expression such as
// "A-Za-z0-9_". A '-' that is first, last, or follows an open range is
// taken literally.
class CharClass {
 public:
  static CharClass parse(std::string_view spec) {
    CharClass cc;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      unsigned char lo = static_cast<unsigned char>(spec[i]);
      if (i + 2 < spec.size() && spec[i + 1] == '-') {
        unsigned char hi = static_cast<unsigned char>(spec[i + 2]);
        if (hi < lo) throw ConfigError("bad character range in allowlist");
        for (unsigned c = lo; c <= hi; ++c) cc.allow_[c] = true;
        i += 2;
      } else {
        cc.allow_[lo] = true;
      }
    }
    return cc;
  }

  bool contains(unsigned char c) const { return allow_[c]; }

  bool operator==(const CharClass&) const = default;

 private:
  std::array<bool, 256> allow_{};
};

// One sanitizer: a builtin, an ordered single-pass character map, or a
// deleting allowlist. Exactly one of the three alternatives is set.
struct SanitizerSpec {
  std::string id;
  std::optional<BuiltinKind> builtin;
  std::vector<std::pair<char, std::string>> char_map;
  std::optional<CharClass> allowlist;

  static SanitizerSpec make_builtin(std::string id, BuiltinKind kind) {
    SanitizerSpec s;
    s.id = std::move(id);
    s.builtin = kind;
    return s;
  }
  static SanitizerSpec make_char_map(
      std::string id, std::vector<std::pair<char, std::string>> map) {
    SanitizerSpec s;
    s.id = std::move(id);
    s.char_map = std::move(map);
    return s;
  }
  static SanitizerSpec make_allowlist(std::string id, std::string_view cls) {
    SanitizerSpec s;
    s.id = std::move(id);
    s.allowlist = CharClass::parse(cls);
    return s;
  }
};

namespace detail {

inline std::string escape_html_impl(std::string_view in, bool escape_apos) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'':
        if (escape_apos) {
          out += "&#39;";
        } else {
          out += c;
        }
        break;
      default: out += c;
    }
  }
  return out;
}

// Escapes for a JS string literal. Leaves '&', '/', ';', '(' and ')'
// alone: those are legal inside a literal, which is exactly what makes
// the escape-order flaw reproducible.
inline std::string escape_js_impl(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string url_encode_impl(std::string_view in) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(in.size());
  for (char ch : in) {
    unsigned char c = static_cast<unsigned char>(ch);
    bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                      (c >= '0' && c <= '9') || c == '.' || c == '_' ||
                      c == '~' || c == '-';
    if (unreserved) {
      out += ch;
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

inline std::string validate_alnum_impl(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  for (char ch : in) {
    unsigned char c = static_cast<unsigned char>(ch);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
        (c >= '0' && c <= '9')) {
      out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string apply_spec(const SanitizerSpec& spec, std::string_view in) {
  if (spec.builtin) {
    switch (*spec.builtin) {
      case BuiltinKind::EscapeHtml: return detail::escape_html_impl(in, true);
      case BuiltinKind::EscapeHtmlNoApos:
        return detail::escape_html_impl(in, false);
      case BuiltinKind::EscapeJs: return detail::escape_js_impl(in);
      case BuiltinKind::UrlEncode: return detail::url_encode_impl(in);
      case BuiltinKind::ValidateAlnum:
        return detail::validate_alnum_impl(in);
      case BuiltinKind::Identity: return std::string(in);
    }
  }
  if (spec.allowlist) {
    std::string out;
    out.reserve(in.size());
    for (char c : in) {
      if (spec.allowlist->contains(static_cast<unsigned char>(c))) out += c;
    }
    return out;
  }
  // Char map: single left-to-right pass, first matching entry wins,
  // produced output is never re-scanned.
  std::string out;
  out.reserve(in.size());
  for (char c : in) {
    bool mapped = false;
    for (const auto& [from, to] : spec.char_map) {
      if (from == c) {
        out += to;
        mapped = true;
        break;
      }
    }
    if (!mapped) out += c;
  }
  return out;
}

// Immutable registry of sanitizers. Construction prepopulates the six
// builtins plus aliases for the spellings corpus files tend to use;
// with_custom/with_alias return extended copies.
class SanitizerRegistry {
 public:
  SanitizerRegistry() {
    add(SanitizerSpec::make_builtin("EscapeHtml", BuiltinKind::EscapeHtml));
    add(SanitizerSpec::make_builtin("EscapeHtmlNoApos",
                                    BuiltinKind::EscapeHtmlNoApos));
    add(SanitizerSpec::make_builtin("EscapeJs", BuiltinKind::EscapeJs));
    add(SanitizerSpec::make_builtin("UrlEncode", BuiltinKind::UrlEncode));
    add(SanitizerSpec::make_builtin("ValidateAlnum",
                                    BuiltinKind::ValidateAlnum));
    add(SanitizerSpec::make_builtin("Identity", BuiltinKind::Identity));
    for (const auto& [name, id] : default_aliases()) aliases_[name] = id;
  }

  static const std::map<std::string, std::string>& default_aliases() {
    static const std::map<std::string, std::string> kAliases = {
        {"escapeHtml", "EscapeHtml"},
        {"escapeHtml4", "EscapeHtml"},
        {"encodeForHTML", "EscapeHtml"},
        {"escapeHtmlNoApos", "EscapeHtmlNoApos"},
        {"escapeJs", "EscapeJs"},
        {"escapeJavascript", "EscapeJs"},
        {"escapejavascript", "EscapeJs"},
        {"encodeForJavaScript", "EscapeJs"},
        {"urlEncode", "UrlEncode"},
        {"encodeForURL", "UrlEncode"},
        {"validateAlnum", "ValidateAlnum"},
        {"getValidInput", "ValidateAlnum"},
        {"identity", "Identity"},
    };
    return kAliases;
  }

  bool has(const std::string& id) const { return specs_.contains(id); }

  // Resolves a corpus-level name to a registry id: exact ids win, then
  // aliases. Returns nullopt for unknown names.
  std::optional<std::string> resolve(const std::string& name) const {
    if (specs_.contains(name)) return name;
    if (auto it = aliases_.find(name); it != aliases_.end()) {
      return it->second;
    }
    return std::nullopt;
  }

  const SanitizerSpec& spec(const std::string& id) const {
    auto it = specs_.find(id);
    if (it == specs_.end()) throw UnknownSanitizer(id);
    return it->second;
  }

  SanitizerRegistry with_custom(SanitizerSpec spec) const {
    if (specs_.contains(spec.id)) throw DuplicateSanitizer(spec.id);
    SanitizerRegistry out = *this;
    out.add(std::move(spec));
    return out;
  }

  SanitizerRegistry with_alias(const std::string& name,
                               const std::string& id) const {
    if (!specs_.contains(id)) throw UnknownSanitizer(id);
    if (specs_.contains(name)) {
      throw ConfigError("alias shadows a sanitizer id: " + name);
    }
    SanitizerRegistry out = *this;
    out.aliases_[name] = id;
    return out;
  }

 private:
  void add(SanitizerSpec spec) { specs_.emplace(spec.id, std::move(spec)); }

  std::map<std::string, SanitizerSpec> specs_;
  std::map<std::string, std::string> aliases_;
};

inline std::string apply_sanitizer(const SanitizerRegistry& registry,
                                   const std::string& id,
                                   std::string_view input) {
  return apply_spec(registry.spec(id), input);
}

// Applies a chain in source-code order: ids[0] first, each later
// sanitizer sees the previous output.
inline std::string apply_path(const SanitizerRegistry& registry,
                              const std::vector<std::string>& ids,
                              std::string_view input) {
  std::string cur(input);
  for (const auto& id : ids) cur = apply_sanitizer(registry, id, cur);
  return cur;
}

inline SanitizerRegistry register_custom(const SanitizerRegistry& registry,
                                         SanitizerSpec spec) {
  return registry.with_custom(std::move(spec));
}

}  // namespace sanscan
