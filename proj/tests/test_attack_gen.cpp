#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>

#include "oracles.hpp"
#include "sanscan/attack_gen.hpp"

using namespace sanscan;

namespace {

TemplateDoc fig3_doc() {
  return parse_template(
      "<input type='button' onclick=\"Func('<%= escapeJs(source(\"u\")) "
      "%>'); \" />",
      "fig3");
}

std::string despace(std::string s) {
  std::erase(s, ' ');
  return s;
}

}  // namespace

TEST_CASE("infer_injection_point captures context and constraints",
          "[attackgen]") {
  SECTION("event-handler sink") {
    InjectionPoint ip = infer_injection_point(fig3_doc(), 0);
    REQUIRE(ip.context.size() == 4);
    CHECK(ip.context[1].name == "onclick");
    CHECK(ip.context[3].kind == FrameKind::JsString);
    CHECK(ip.marker.size() == 16);
    CHECK(ip.skeleton.substr(ip.marker_offset, 16) == ip.marker);
    CHECK(ip.left_constraint.ends_with("Func('"));
    CHECK(ip.left_constraint.starts_with("<input"));
    CHECK(ip.right_constraint.starts_with("');"));
    // constraints plus marker slice the skeleton contiguously
    std::string slice = ip.left_constraint + ip.marker + ip.right_constraint;
    CHECK(ip.skeleton.find(slice) != std::string::npos);
  }
  SECTION("body sink") {
    TemplateDoc doc = parse_template("<p><%= x %></p>", "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    REQUIRE(ip.context.size() == 1);
    CHECK(ip.context[0].kind == FrameKind::HtmlData);
    CHECK(ip.left_constraint == "<p>");
    CHECK(ip.right_constraint == "</p>");
  }
  SECTION("context is recomputable from the empty skeleton") {
    TemplateDoc doc = fig3_doc();
    InjectionPoint ip = infer_injection_point(doc, 0);
    CHECK(ip.context == context_at(render_empty(doc), ip.marker_offset));
  }
  SECTION("no such sink") {
    CHECK_THROWS_AS(infer_injection_point(fig3_doc(), 7), Error);
  }
}

TEST_CASE("marker collisions re-randomize, then fail", "[attackgen]") {
  TemplateDoc doc = parse_template("<p>AAAABBBBCCCCDDDD<%= x %></p>", "t");

  SECTION("a persistent collision fails after 8 attempts") {
    int calls = 0;
    auto rigged = [&](int) {
      ++calls;
      return std::string("AAAABBBBCCCCDDDD");
    };
    CHECK_THROWS_AS(infer_injection_point(doc, 0, rigged), MarkerCollision);
    CHECK(calls == 8);
  }
  SECTION("a later attempt succeeds") {
    auto rigged = [&](int attempt) {
      return attempt < 3 ? std::string("AAAABBBBCCCCDDDD")
                         : std::string("ZZZZYYYYXXXXWWWW");
    };
    InjectionPoint ip = infer_injection_point(doc, 0, rigged);
    CHECK(ip.marker == "ZZZZYYYYXXXXWWWW");
  }
}

TEST_CASE("generate_vectors finds the figure-3 pattern", "[attackgen]") {
  InjectionPoint ip = infer_injection_point(fig3_doc(), 0);
  auto vectors = generate_vectors(ip, "alert", 3);
  REQUIRE_FALSE(vectors.empty());

  SECTION("contains the pre / payload / post pattern") {
    bool found = false;
    for (const auto& v : vectors) {
      if (v.pre_escape == "');" && v.payload.find("alert(1)") == 0 &&
          v.post_escape == "//") {
        found = true;
      }
    }
    CHECK(found);
  }
  SECTION("shortest-first, and the paper vector is the shortest") {
    CHECK(despace(vectors[0].full) == "');alert(1);//");
    for (std::size_t i = 1; i < vectors.size(); ++i) {
      CHECK(vectors[i - 1].full.size() <= vectors[i].full.size());
    }
  }
  SECTION("every vector is a verified true attack") {
    for (const auto& v : vectors) {
      CHECK(verify_true_attack(ip, v, "alert"));
      CHECK(v.full == v.pre_escape + v.payload + v.post_escape);
    }
  }
  SECTION("deterministic across runs") {
    InjectionPoint ip2 = infer_injection_point(fig3_doc(), 0);
    auto vectors2 = generate_vectors(ip2, "alert", 3);
    REQUIRE(vectors.size() == vectors2.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      CHECK(vectors[i].full == vectors2[i].full);
    }
  }
  SECTION("candidate cap truncates deterministically") {
    auto capped = generate_vectors(ip, "alert", 3, 1);
    CHECK(capped.size() <= 1);
  }
}

TEST_CASE("non-executable contexts get context-switching forms",
          "[attackgen]") {
  SECTION("body sink: script element") {
    TemplateDoc doc = parse_template("<p><%= x %></p>", "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    auto vectors = generate_vectors(ip, "alert", 3);
    bool script_form = false;
    for (const auto& v : vectors) {
      if (v.full == "<script>alert(1);</script>") script_form = true;
    }
    CHECK(script_form);
  }
  SECTION("plain attribute: new-attribute injection") {
    TemplateDoc doc = parse_template("<div title=\"<%= x %>\">t</div>", "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    auto vectors = generate_vectors(ip, "alert", 3);
    bool new_attr = false;
    for (const auto& v : vectors) {
      if (v.full.find("\" onclick=\"") == 0) new_attr = true;
    }
    CHECK(new_attr);
  }
  SECTION("url attribute: javascript: scheme") {
    TemplateDoc doc = parse_template("<a href=\"<%= x %>\">go</a>", "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    auto vectors = generate_vectors(ip, "alert", 3);
    bool js_scheme = false;
    for (const auto& v : vectors) {
      if (v.full.find("javascript:") == 0) js_scheme = true;
    }
    CHECK(js_scheme);
  }
  SECTION("script raw text: close and reopen") {
    TemplateDoc doc =
        parse_template("<script>q = '<%= x %>';</script>", "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    auto vectors = generate_vectors(ip, "alert", 3);
    bool reopen = false;
    for (const auto& v : vectors) {
      if (v.full == "</script><script>alert(1);</script>") reopen = true;
    }
    CHECK(reopen);
  }
}

TEST_CASE("verify_true_attack is the browser-model oracle", "[attackgen]") {
  TemplateDoc doc = parse_template(
      "<input type=\"button\" onclick=\"loadPatient('getPatientID.jsp?"
      "forward=<%= escapeHtml(source(\"forward\")) %>');\" />",
      "fig6");
  InjectionPoint ip = infer_injection_point(doc, 0);

  CHECK(verify_true_attack(ip, {"');", " alert(1); ", "//", "'); alert(1); //"},
                           "alert"));
  CHECK_FALSE(verify_true_attack(ip, {"", "hello", "", "hello"}, "alert"));
  // without the pre-escape the canary stays inside the JS string
  CHECK_FALSE(verify_true_attack(ip, {"", "alert(1)", "", "alert(1)"},
                                 "alert"));
}

TEST_CASE("generator agrees with brute-force search on fixtures",
          "[attackgen][oracle]") {
  // Spot-check two shapes here; the acceptance suite sweeps all fixtures.
  for (const char* src :
       {"<p><%= x %></p>",
        "<input onclick=\"go('<%= x %>');\">"}) {
    TemplateDoc doc = parse_template(src, "t");
    InjectionPoint ip = infer_injection_point(doc, 0);
    bool brute = oracles::brute_force_attack_exists(ip, "alert");
    bool generated = !generate_vectors(ip, "alert", 3).empty();
    CHECK(brute == generated);
  }
}
