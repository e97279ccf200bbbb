#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sanscan/context.hpp"
#include "sanscan/html_scanner.hpp"
#include "sanscan/js_parser.hpp"
#include "sanscan/transduction.hpp"

namespace sanscan {

enum class Trigger { PageLoad, SimulatedInteraction };

inline std::string to_string(Trigger t) {
  return t == Trigger::PageLoad ? "PageLoad" : "SimulatedInteraction";
}

// One executable program the modeled browser would hand to its JS
// interpreter, after the transductions that apply on that path.
struct ExecutionEvent {
  std::string program;  // JS source after all decoding
  ContextStack provenance;
  Trigger trigger = Trigger::PageLoad;
  bool canary_call_found = false;
};

inline ContextStack context_at(std::string_view html, std::size_t offset) {
  return HtmlScanner::context_at(html, offset);
}

// Collects every executable in document order:
//   - <script> bodies, raw, run at page load;
//   - on* attribute values, entity-decoded once, run by the simulated
//     interaction;
//   - URL attributes whose entity-decoded, whitespace/control-stripped
//     value starts with "javascript:": the remainder percent-decoded once,
//     run by the simulated interaction.
inline std::vector<ExecutionEvent> extract_executables(std::string_view html) {
  HtmlScanner scanner(html);
  struct Entry {
    std::size_t position;
    ExecutionEvent event;
  };
  std::vector<Entry> entries;

  for (const auto& body : scanner.raw_bodies()) {
    if (body.element != "script") continue;
    ExecutionEvent ev;
    ev.program = std::string(html.substr(body.start, body.end - body.start));
    ev.provenance = {ContextFrame::html_data(), ContextFrame::script_data(),
                     ContextFrame::js_code()};
    ev.trigger = Trigger::PageLoad;
    entries.push_back({body.start, std::move(ev)});
  }

  for (const auto& attr : scanner.attrs()) {
    if (attr.in_end_tag) continue;
    AttrClass cls = classify_attr(attr.name);
    if (cls == AttrClass::EventHandler) {
      ExecutionEvent ev;
      ev.program = decode_entities(attr.value);
      ev.provenance = {ContextFrame::html_data(),
                       ContextFrame::attr_value(attr.name, cls, attr.quote),
                       ContextFrame::js_code()};
      ev.trigger = Trigger::SimulatedInteraction;
      entries.push_back({attr.value_start, std::move(ev)});
    } else if (cls == AttrClass::Url) {
      std::string stripped = strip_ws_ctl(decode_entities(attr.value));
      if (!htmldetail::ci_starts_with(stripped, "javascript:")) continue;
      ExecutionEvent ev;
      ev.program = percent_decode(std::string_view(stripped).substr(11));
      ev.provenance = {ContextFrame::html_data(),
                       ContextFrame::attr_value(attr.name, cls, attr.quote),
                       ContextFrame::url_scheme("javascript"),
                       ContextFrame::js_code()};
      ev.trigger = Trigger::SimulatedInteraction;
      entries.push_back({attr.value_start, std::move(ev)});
    }
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     return a.position < b.position;
                   });
  std::vector<ExecutionEvent> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.event));
  return out;
}

// Runs every executable: an event gets canary_call_found when its program
// parses and contains a statement-level bare call to `canary`
// (case-insensitive). Programs that fail to parse never execute.
inline std::vector<ExecutionEvent> executes_canary(std::string_view html,
                                                   std::string_view canary) {
  std::vector<ExecutionEvent> events = extract_executables(html);
  for (auto& ev : events) {
    ev.canary_call_found = js_has_canary_stmt(ev.program, canary);
  }
  return events;
}

inline bool any_canary_fires(std::string_view html, std::string_view canary) {
  for (const auto& ev : executes_canary(html, canary)) {
    if (ev.canary_call_found) return true;
  }
  return false;
}

}  // namespace sanscan
