#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "sanscan/browser_model.hpp"

using namespace sanscan;

namespace {

std::size_t offset_of(const std::string& html, char probe) {
  auto pos = html.find(probe);
  REQUIRE(pos != std::string::npos);
  return pos;
}

}  // namespace

TEST_CASE("context_at tracks nested parse contexts", "[browser]") {
  SECTION("event handler, JS string inside call") {
    std::string html = "<input onclick=\"Func('X');\">";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 4);
    CHECK(ctx[0].kind == FrameKind::HtmlData);
    CHECK(ctx[1].kind == FrameKind::AttrValue);
    CHECK(ctx[1].name == "onclick");
    CHECK(ctx[1].attr_class == AttrClass::EventHandler);
    CHECK(ctx[1].quote == QuoteKind::Double);
    CHECK(ctx[2].kind == FrameKind::JsCode);
    CHECK(ctx[3].kind == FrameKind::JsString);
    CHECK(ctx[3].quote == QuoteKind::Single);
  }
  SECTION("top-level text") {
    std::string html = "<p>X</p>";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 1);
    CHECK(ctx[0].kind == FrameKind::HtmlData);
  }
  SECTION("javascript: URL") {
    std::string html = "<a href=\"javascript:f('X')\">";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 5);
    CHECK(ctx[1].kind == FrameKind::AttrValue);
    CHECK(ctx[1].attr_class == AttrClass::Url);
    CHECK(ctx[2].kind == FrameKind::UrlScheme);
    CHECK(ctx[2].name == "javascript");
    CHECK(ctx[3].kind == FrameKind::JsCode);
    CHECK(ctx[4].kind == FrameKind::JsString);
  }
  SECTION("plain URL records the scheme only") {
    std::string html = "<a href=\"https://example/X\">";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 3);
    CHECK(ctx[2].kind == FrameKind::UrlScheme);
    CHECK(ctx[2].name == "https");
  }
  SECTION("script body") {
    std::string html = "<script>q = 'X';</script>";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 4);
    CHECK(ctx[1].kind == FrameKind::ScriptData);
    CHECK(ctx[2].kind == FrameKind::JsCode);
    CHECK(ctx[3].kind == FrameKind::JsString);
  }
  SECTION("style body and style attribute") {
    std::string html = "<style>X</style>";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 2);
    CHECK(ctx[1].kind == FrameKind::StyleData);

    std::string html2 = "<div style=\"color: X\">";
    ContextStack ctx2 = context_at(html2, offset_of(html2, 'X'));
    REQUIRE(ctx2.size() == 2);
    CHECK(ctx2[1].attr_class == AttrClass::Style);
  }
  SECTION("comment") {
    std::string html = "<!-- X -->";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 2);
    CHECK(ctx[1].kind == FrameKind::HtmlComment);
  }
  SECTION("unquoted attribute value") {
    std::string html = "<div title=X>";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 2);
    CHECK(ctx[1].kind == FrameKind::AttrValue);
    CHECK(ctx[1].quote == QuoteKind::Unquoted);
    CHECK(ctx[1].attr_class == AttrClass::Plain);
  }
  SECTION("entity-decoded handler prefix extends into the right JS frame") {
    // value so far is Func(&#39; which decodes to Func(' — inside a string
    std::string html = "<input onclick=\"Func(&#39;X\">";
    ContextStack ctx = context_at(html, offset_of(html, 'X'));
    REQUIRE(ctx.size() == 4);
    CHECK(ctx[3].kind == FrameKind::JsString);
  }
  SECTION("offset bounds") {
    CHECK_NOTHROW(context_at("<p>", 3));
    CHECK_THROWS_AS(context_at("<p>", 4), OffsetOutOfRange);
  }
}

TEST_CASE("context_at is total", "[browser][property]") {
  std::mt19937 rng(123);
  static const char* fragments[] = {
      "<", ">", "a", "<p>", "</p>", "\"", "'", "=", " ", "<script>",
      "</script>", "<!--", "-->", "onclick=\"f(", "<a href=\"", "javascript:",
      "&#39;", "%27", "<input ", "title=", "/>", "<!", "</", "x",
  };
  std::uniform_int_distribution<std::size_t> pick(0, std::size(fragments) - 1);
  for (int doc = 0; doc < 60; ++doc) {
    std::string html;
    std::uniform_int_distribution<int> parts(0, 12);
    int n = parts(rng);
    for (int i = 0; i < n; ++i) html += fragments[pick(rng)];
    for (std::size_t off = 0; off <= html.size(); ++off) {
      ContextStack ctx = context_at(html, off);
      REQUIRE_FALSE(ctx.empty());
      CHECK(ctx[0].kind == FrameKind::HtmlData);
    }
  }
}

TEST_CASE("extract_executables", "[browser]") {
  SECTION("single handler") {
    auto evs = extract_executables("<input onclick=\"f(1)\">");
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].program == "f(1)");
    CHECK(evs[0].trigger == Trigger::SimulatedInteraction);
    CHECK(evs[0].provenance[1].name == "onclick");
  }
  SECTION("javascript: URL is entity- then percent-decoded") {
    auto evs = extract_executables("<a href=\"javascript:g(%27x%27)\">");
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].program == "g('x')");
    CHECK(evs[0].trigger == Trigger::SimulatedInteraction);
  }
  SECTION("handler value is entity-decoded once") {
    auto evs = extract_executables(
        "<input onclick=\"Func('&#39;); alert(1); //');\">");
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].program == "Func(''); alert(1); //');");
  }
  SECTION("document order, script first") {
    auto evs = extract_executables(
        "<script>a(1);</script><input onclick=\"b(2)\">");
    REQUIRE(evs.size() == 2);
    CHECK(evs[0].program == "a(1);");
    CHECK(evs[0].trigger == Trigger::PageLoad);
    CHECK(evs[1].program == "b(2)");
  }
  SECTION("scheme detection strips whitespace and control characters") {
    auto evs = extract_executables("<a href=\" java\tscript:f(1)\">");
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].program == "f(1)");
  }
  SECTION("non-javascript URLs are not executable") {
    CHECK(extract_executables("<a href=\"https://x/\">").empty());
    CHECK(extract_executables("<a href=\"javascript%3Af(1)\">").empty());
  }
  SECTION("style and plain attributes are not executable") {
    CHECK(extract_executables("<div style=\"x\" title=\"alert(1)\">").empty());
  }
}

TEST_CASE("executes_canary", "[browser]") {
  SECTION("attacked handler fires") {
    auto evs = executes_canary(
        "<input onclick=\"Func('&#39;); alert(1); //');\">", "alert");
    REQUIRE(evs.size() == 1);
    CHECK(evs[0].canary_call_found);
  }
  SECTION("HtmlData is not executable") {
    CHECK(executes_canary("<p>alert(1)</p>", "alert").empty());
  }
  SECTION("canary inside a JS string literal does not fire") {
    auto evs = executes_canary("<input onclick=\"f('alert(1)')\">", "alert");
    REQUIRE(evs.size() == 1);
    CHECK_FALSE(evs[0].canary_call_found);
  }
  SECTION("non-parsing program never fires") {
    auto evs = executes_canary("<input onclick=\"alert(1); 'open\">", "alert");
    REQUIRE(evs.size() == 1);
    CHECK_FALSE(evs[0].canary_call_found);
  }
  SECTION("case-insensitive canary match") {
    CHECK(any_canary_fires("<input onclick=\"Alert(1);\">", "alert"));
  }
  SECTION("decoding order: entity, then percent, then parse") {
    // %27 decodes to a quote inside the javascript: URL, so this fires
    CHECK(any_canary_fires(
        "<a href=\"javascript:f('%27%29;alert(1);//')\">", "alert"));
    // %26%2339%3B decodes to &#39; which is NOT entity-decoded again,
    // so the quote never re-forms and the canary stays inside a string
    CHECK_FALSE(any_canary_fires(
        "<a href=\"javascript:f('%26%2339%3B);alert(1);//')\">", "alert"));
  }
}
