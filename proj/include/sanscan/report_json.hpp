#pragma once

#include <json.hpp>

#include "sanscan/evaluator.hpp"

namespace sanscan {

inline nlohmann::ordered_json to_json(const ContextStack& ctx) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& frame : ctx) arr.push_back(to_string(frame));
  return arr;
}

inline nlohmann::ordered_json to_json(const ExecutionEvent& ev) {
  return nlohmann::ordered_json{
      {"program", ev.program},
      {"contextPath", to_json(ev.provenance)},
      {"trigger", to_string(ev.trigger)},
      {"canaryFound", ev.canary_call_found},
  };
}

inline nlohmann::ordered_json to_json(const Config& cfg) {
  nlohmann::ordered_json customs = nlohmann::ordered_json::array();
  for (const auto& spec : cfg.custom_sanitizers) {
    nlohmann::ordered_json c{{"id", spec.id}};
    if (!spec.char_map.empty()) {
      nlohmann::ordered_json m = nlohmann::ordered_json::object();
      for (const auto& [from, to] : spec.char_map) {
        m[std::string(1, from)] = to;
      }
      c["map"] = std::move(m);
    }
    customs.push_back(std::move(c));
  }
  nlohmann::ordered_json aliases = nlohmann::ordered_json::object();
  for (const auto& [name, id] : cfg.sanitizer_aliases) aliases[name] = id;
  return nlohmann::ordered_json{
      {"canary", cfg.canary},
      {"depth", cfg.depth},
      {"candidate_cap", cfg.candidate_cap},
      {"custom_sanitizers", std::move(customs)},
      {"sanitizer_aliases", std::move(aliases)},
  };
}

inline nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const auto& r : report.test_cases) {
    nlohmann::ordered_json c;
    c["file"] = r.file_id;
    if (r.verdict.kind == VerdictKind::ExtractionError && r.sink_index < 0) {
      c["verdict"] = to_string(r.verdict.kind);
      c["error"] = r.verdict.error;
      c["timingMs"] = r.timing_ms;
      cases.push_back(std::move(c));
      continue;
    }
    c["sink"] = r.sink_index;
    c["sanitizers"] = r.spec.representative.sanitizers;
    c["contextPath"] = to_json(r.spec.context);
    c["mergedCount"] = r.spec.merged_from.size();
    c["verdict"] = to_string(r.verdict.kind);
    switch (r.verdict.kind) {
      case VerdictKind::Vulnerable:
        c["witness"] = nlohmann::ordered_json{
            {"pre", r.verdict.witness->pre_escape},
            {"payload", r.verdict.witness->payload},
            {"post", r.verdict.witness->post_escape},
            {"full", r.verdict.witness->full},
        };
        if (r.verdict.event) c["event"] = to_json(*r.verdict.event);
        break;
      case VerdictKind::Safe:
        c["vectorsTried"] = r.verdict.vectors_tried;
        c["caveat"] = "safe-relative-to-generated-vectors";
        break;
      case VerdictKind::NoVectorWithinBound:
        break;
      case VerdictKind::ExtractionError:
        c["error"] = r.verdict.error;
        break;
    }
    c["timingMs"] = r.timing_ms;
    cases.push_back(std::move(c));
  }
  return nlohmann::ordered_json{
      {"version", report.version},
      {"files", report.file_count},
      {"sinks", report.sink_count},
      {"config", to_json(report.config)},
      {"testCases", std::move(cases)},
  };
}

// Report with timing zeroed, for byte-identity comparisons.
inline nlohmann::ordered_json to_json_without_timing(const Report& report) {
  nlohmann::ordered_json j = to_json(report);
  for (auto& c : j["testCases"]) c["timingMs"] = 0.0;
  return j;
}

}  // namespace sanscan
