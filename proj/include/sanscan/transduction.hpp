#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sanscan {

namespace detail {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace detail

// Decodes the named references amp/lt/gt/quot/apos and semicolon-terminated
// numeric references, in one left-to-right pass. Decoded output is never
// re-scanned, so "&amp;#39;" comes out as "&#39;". Anything unknown or
// unterminated passes through.
inline std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    std::string_view rest = s.substr(i);
    static constexpr std::pair<std::string_view, char> kNamed[] = {
        {"&amp;", '&'}, {"&lt;", '<'},   {"&gt;", '>'},
        {"&quot;", '"'}, {"&apos;", '\''},
    };
    bool matched = false;
    for (const auto& [name, ch] : kNamed) {
      if (rest.starts_with(name)) {
        out += ch;
        i += name.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (rest.size() >= 4 && rest[1] == '#') {
      std::size_t j = 2;
      std::uint32_t cp = 0;
      bool ok = false;
      bool overflow = false;
      if (rest[2] == 'x' || rest[2] == 'X') {
        j = 3;
        while (j < rest.size() && detail::hex_value(rest[j]) >= 0) {
          cp = cp * 16 + static_cast<std::uint32_t>(detail::hex_value(rest[j]));
          if (cp > 0x10FFFF) overflow = true;
          ++j;
        }
        ok = j > 3;
      } else {
        while (j < rest.size() && detail::is_ascii_digit(rest[j])) {
          cp = cp * 10 + static_cast<std::uint32_t>(rest[j] - '0');
          if (cp > 0x10FFFF) overflow = true;
          ++j;
        }
        ok = j > 2;
      }
      bool surrogate = cp >= 0xD800 && cp <= 0xDFFF;
      if (ok && !overflow && !surrogate && j < rest.size() && rest[j] == ';') {
        detail::append_utf8(out, cp);
        i += j + 1;
        continue;
      }
    }
    out += '&';
    ++i;
  }
  return out;
}

// Single-pass %HH decoding. Invalid sequences pass through; decoded bytes
// are not re-scanned, so "%2527" yields "%27".
inline std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = detail::hex_value(s[i + 1]);
      int lo = detail::hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>((hi << 4) | lo);
        i += 3;
        continue;
      }
    }
    out += s[i++];
  }
  return out;
}

// Removes ASCII whitespace and control characters, the way a URL scheme
// check sees an attribute value.
inline std::string strip_ws_ctl(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (static_cast<unsigned char>(c) > 0x20) out += c;
  }
  return out;
}

}  // namespace sanscan
