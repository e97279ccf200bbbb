#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sanscan/attack_gen.hpp"
#include "sanscan/browser_model.hpp"
#include "sanscan/config.hpp"
#include "sanscan/errors.hpp"
#include "sanscan/path_extractor.hpp"
#include "sanscan/sanitizers.hpp"
#include "sanscan/template_doc.hpp"
#include "sanscan/version.hpp"

namespace sanscan {

enum class VerdictKind { Vulnerable, Safe, NoVectorWithinBound, ExtractionError };

struct Verdict {
  VerdictKind kind = VerdictKind::Safe;
  std::optional<AttackVector> witness;   // Vulnerable
  std::optional<ExecutionEvent> event;   // Vulnerable
  int vectors_tried = 0;                 // Safe
  std::string error;                     // ExtractionError

  static Verdict vulnerable(AttackVector v, ExecutionEvent ev) {
    Verdict out;
    out.kind = VerdictKind::Vulnerable;
    out.witness = std::move(v);
    out.event = std::move(ev);
    return out;
  }
  static Verdict safe(int tried) {
    Verdict out;
    out.vectors_tried = tried;
    return out;
  }
  static Verdict no_vector() {
    Verdict out;
    out.kind = VerdictKind::NoVectorWithinBound;
    return out;
  }
  static Verdict extraction_error(std::string msg) {
    Verdict out;
    out.kind = VerdictKind::ExtractionError;
    out.error = std::move(msg);
    return out;
  }
};

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Vulnerable: return "vulnerable";
    case VerdictKind::Safe: return "safe";
    case VerdictKind::NoVectorWithinBound: return "noVectorWithinBound";
    case VerdictKind::ExtractionError: return "error";
  }
  return "";
}

struct TestCaseResult {
  std::string file_id;
  int sink_index = -1;  // -1 for file-level extraction errors
  TestCaseSpec spec;    // empty for file-level errors
  Verdict verdict;
  double timing_ms = 0.0;
};

struct Report {
  std::string version = kVersion;
  int file_count = 0;
  int sink_count = 0;
  Config config;
  std::vector<TestCaseResult> test_cases;
};

// Runs one merged test case: generate vectors for the unsanitized
// injection point, push each through the sanitizer chain, and ask the
// browser model. Stops at the first vector that executes, so the witness
// is the shortest successful one.
inline Verdict evaluate_test_case(const TestCaseSpec& tc,
                                  const SanitizerRegistry& registry,
                                  const std::string& canary, int depth,
                                  int candidate_cap = 10000) {
  if (!tc.injection_point) {
    return Verdict::extraction_error("injection point not populated");
  }
  const InjectionPoint& ip = *tc.injection_point;
  try {
    std::vector<AttackVector> vectors =
        generate_vectors(ip, canary, depth, candidate_cap);
    if (vectors.empty()) return Verdict::no_vector();
    for (const AttackVector& v : vectors) {
      std::string sanitized =
          apply_path(registry, tc.representative.sanitizers, v.full);
      std::string attacked = substitute(ip, sanitized);
      for (ExecutionEvent& ev : executes_canary(attacked, canary)) {
        if (ev.canary_call_found) {
          return Verdict::vulnerable(v, std::move(ev));
        }
      }
    }
    return Verdict::safe(static_cast<int>(vectors.size()));
  } catch (const UnknownSanitizer& e) {
    return Verdict::extraction_error(e.what());
  }
}

// Whole-corpus scan: parse every .san.html file, extract and merge
// paths, infer injection points, evaluate. Extraction problems become
// per-entry error verdicts; one bad file never aborts the run.
inline Report run_corpus(const std::filesystem::path& corpus_dir,
                         const Config& cfg) {
  namespace fs = std::filesystem;
  if (!fs::exists(corpus_dir) || !fs::is_directory(corpus_dir)) {
    throw IoError(corpus_dir.string(), "not a directory");
  }

  SanitizerRegistry registry = build_registry(cfg);
  Report report;
  report.config = cfg;

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 9 && name.ends_with(".san.html")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  report.file_count = static_cast<int>(files.size());

  std::map<std::string, TemplateDoc> docs;
  std::vector<SanitizationPath> all_paths;
  std::map<std::pair<std::string, int>, ContextStack> contexts;
  std::vector<TestCaseResult> error_entries;

  for (const auto& path : files) {
    std::string file_id = path.filename().string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      TestCaseResult r;
      r.file_id = file_id;
      r.verdict = Verdict::extraction_error("unreadable file");
      error_entries.push_back(std::move(r));
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      TemplateDoc doc = parse_template(buf.str(), file_id);
      report.sink_count += doc.sink_count;
      std::vector<SanitizationPath> paths = extract_paths(doc, registry);
      std::string skeleton = render_empty(doc);
      for (const auto& [sink, offset] : locate_sinks(doc)) {
        contexts[{file_id, sink}] = context_at(skeleton, offset);
      }
      docs.emplace(file_id, std::move(doc));
      all_paths.insert(all_paths.end(), paths.begin(), paths.end());
    } catch (const Error& e) {
      TestCaseResult r;
      r.file_id = file_id;
      r.verdict = Verdict::extraction_error(e.what());
      error_entries.push_back(std::move(r));
    }
  }

  std::vector<TestCaseSpec> cases = merge_similar(std::move(all_paths), contexts);
  for (TestCaseSpec& tc : cases) {
    TestCaseResult r;
    r.file_id = tc.representative.file_id;
    r.sink_index = tc.representative.sink_index;
    auto started = std::chrono::steady_clock::now();
    try {
      tc.injection_point = infer_injection_point(
          docs.at(tc.representative.file_id), tc.representative.sink_index);
      r.verdict = evaluate_test_case(tc, registry, cfg.canary, cfg.depth,
                                     cfg.candidate_cap);
    } catch (const Error& e) {
      r.verdict = Verdict::extraction_error(e.what());
    }
    r.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    r.spec = std::move(tc);
    report.test_cases.push_back(std::move(r));
  }
  for (auto& r : error_entries) report.test_cases.push_back(std::move(r));

  std::stable_sort(report.test_cases.begin(), report.test_cases.end(),
                   [](const TestCaseResult& a, const TestCaseResult& b) {
                     if (a.file_id != b.file_id) return a.file_id < b.file_id;
                     if (a.sink_index != b.sink_index) {
                       return a.sink_index < b.sink_index;
                     }
                     return a.spec.representative.sanitizers <
                            b.spec.representative.sanitizers;
                   });
  return report;
}

inline bool report_has_vulnerability(const Report& report) {
  return std::any_of(report.test_cases.begin(), report.test_cases.end(),
                     [](const TestCaseResult& r) {
                       return r.verdict.kind == VerdictKind::Vulnerable;
                     });
}

}  // namespace sanscan
