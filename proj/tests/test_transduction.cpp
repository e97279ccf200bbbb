#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "sanscan/sanitizers.hpp"
#include "sanscan/transduction.hpp"

using namespace sanscan;

TEST_CASE("decode_entities", "[transduction]") {
  CHECK(decode_entities("&#39;);Alert(1);//") == "');Alert(1);//");
  CHECK(decode_entities("&amp;&lt;&gt;&quot;&apos;") == "&<>\"'");
  CHECK(decode_entities("&#x27;&#X27;") == "''");
  CHECK(decode_entities("&#10003;") == "\xE2\x9C\x93");  // U+2713

  SECTION("single pass: decoded output is not re-scanned") {
    CHECK(decode_entities("&amp;#39;") == "&#39;");
    CHECK(decode_entities("&amp;amp;") == "&amp;");
  }
  SECTION("unknown and unterminated references pass through") {
    CHECK(decode_entities("a&b") == "a&b");
    CHECK(decode_entities("&#39") == "&#39");
    CHECK(decode_entities("&#;") == "&#;");
    CHECK(decode_entities("&bogus;") == "&bogus;");
    CHECK(decode_entities("&#xZZ;") == "&#xZZ;");
    CHECK(decode_entities("&") == "&");
  }
  SECTION("out-of-range and surrogate code points pass through") {
    CHECK(decode_entities("&#x110000;") == "&#x110000;");
    CHECK(decode_entities("&#xD800;") == "&#xD800;");
  }
}

TEST_CASE("percent_decode", "[transduction]") {
  CHECK(percent_decode("%27%29") == "')");
  CHECK(percent_decode("%2f%2F") == "//");
  CHECK(percent_decode("100%") == "100%");
  CHECK(percent_decode("%2g") == "%2g");
  CHECK(percent_decode("") == "");

  SECTION("single pass: no double decode") {
    CHECK(percent_decode("%2527") == "%27");
    CHECK(percent_decode("%252527") == "%2527");
  }
}

TEST_CASE("strip_ws_ctl", "[transduction]") {
  CHECK(strip_ws_ctl("java\tscript:") == "javascript:");
  CHECK(strip_ws_ctl(" j a v a\nscript:\r") == "javascript:");
  CHECK(strip_ws_ctl("ja\x01va\x1fscript:") == "javascript:");
}

TEST_CASE("transduction round trips", "[transduction][property]") {
  SanitizerRegistry reg;
  std::mt19937 rng(99);
  static const std::string pool = "ab&XY01 <>\"'();/%#\\.\n\t";
  auto random_string = [&](bool allow_amp) {
    std::uniform_int_distribution<std::size_t> len(0, 50);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    std::string out;
    std::size_t n = len(rng);
    while (out.size() < n) {
      char c = pool[pick(rng)];
      if (!allow_amp && c == '&') continue;
      out += c;
    }
    return out;
  };

  SECTION("decode_entities undoes EscapeHtml on &-free input") {
    for (int i = 0; i < 300; ++i) {
      std::string s = random_string(/*allow_amp=*/false);
      CHECK(decode_entities(apply_sanitizer(reg, "EscapeHtml", s)) == s);
    }
  }
  SECTION("percent_decode undoes UrlEncode") {
    for (int i = 0; i < 300; ++i) {
      std::string s = random_string(/*allow_amp=*/true);
      CHECK(percent_decode(apply_sanitizer(reg, "UrlEncode", s)) == s);
    }
  }
}
