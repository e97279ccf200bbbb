#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sanscan/sanscan.hpp"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitVulnerable = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sanscan::IoError(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

sanscan::Config load_config_or_default(const std::string& path) {
  if (path.empty()) return sanscan::Config{};
  return sanscan::load_config(path);
}

std::string chain_text(const std::vector<std::string>& ids) {
  if (ids.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += " -> ";
    out += ids[i];
  }
  return out;
}

std::string verdict_note(const sanscan::TestCaseResult& r) {
  using sanscan::VerdictKind;
  switch (r.verdict.kind) {
    case VerdictKind::Vulnerable: return r.verdict.witness->full;
    case VerdictKind::Safe:
      return "tried " + std::to_string(r.verdict.vectors_tried) + " vectors";
    case VerdictKind::NoVectorWithinBound: return "";
    case VerdictKind::ExtractionError: return r.verdict.error;
  }
  return "";
}

void print_table(const sanscan::Report& report) {
  struct Row {
    std::string file, sink, chain, verdict, note;
  };
  std::vector<Row> rows;
  rows.push_back({"FILE", "SINK", "SANITIZERS", "VERDICT", "WITNESS / NOTE"});
  for (const auto& r : report.test_cases) {
    Row row;
    row.file = r.file_id;
    row.sink = r.sink_index < 0 ? "-" : std::to_string(r.sink_index);
    row.chain = r.sink_index < 0
                    ? "-"
                    : chain_text(r.spec.representative.sanitizers);
    row.verdict = sanscan::to_string(r.verdict.kind);
    row.note = verdict_note(r);
    rows.push_back(std::move(row));
  }
  std::size_t w0 = 0, w1 = 0, w2 = 0, w3 = 0;
  for (const auto& r : rows) {
    w0 = std::max(w0, r.file.size());
    w1 = std::max(w1, r.sink.size());
    w2 = std::max(w2, r.chain.size());
    w3 = std::max(w3, r.verdict.size());
  }
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(static_cast<int>(w0) + 2) << r.file
              << std::setw(static_cast<int>(w1) + 2) << r.sink
              << std::setw(static_cast<int>(w2) + 2) << r.chain
              << std::setw(static_cast<int>(w3) + 2) << r.verdict << r.note
              << "\n";
  }
}

int run_scan(const std::string& dir, const std::string& config_path,
             const std::string& json_path, bool quiet) {
  sanscan::Config cfg = load_config_or_default(config_path);
  sanscan::Report report = sanscan::run_corpus(dir, cfg);

  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw sanscan::IoError(json_path);
    out << sanscan::to_json(report).dump(2) << "\n";
  }
  if (!quiet) {
    if (report.test_cases.empty()) {
      std::cout << "0 test cases\n";
    } else {
      print_table(report);
      int vulnerable = 0;
      int safe = 0;
      int errors = 0;
      for (const auto& r : report.test_cases) {
        switch (r.verdict.kind) {
          case sanscan::VerdictKind::Vulnerable: ++vulnerable; break;
          case sanscan::VerdictKind::Safe: ++safe; break;
          case sanscan::VerdictKind::ExtractionError: ++errors; break;
          default: break;
        }
      }
      std::cout << "\n"
                << report.test_cases.size() << " test cases from "
                << report.file_count << " files: " << vulnerable
                << " vulnerable, " << safe << " safe, " << errors
                << " errors\n";
      if (safe > 0) {
        std::cout << "note: safe verdicts are relative to the generated "
                     "vector set, not a proof of security\n";
      }
    }
  }
  return sanscan::report_has_vulnerability(report) ? kExitVulnerable
                                                   : kExitClean;
}

int run_contexts(const std::string& file, const std::string& config_path) {
  load_config_or_default(config_path);  // validated for consistency
  std::string text = read_file(file);
  sanscan::TemplateDoc doc = sanscan::parse_template(
      text, std::filesystem::path(file).filename().string());
  std::string skeleton = sanscan::render_empty(doc);
  auto sinks = sanscan::locate_sinks(doc);
  if (sinks.empty()) {
    std::cout << "no sinks\n";
    return kExitClean;
  }
  for (const auto& [sink, offset] : sinks) {
    sanscan::ContextStack ctx = sanscan::context_at(skeleton, offset);
    std::cout << "sink " << sink << " @ offset " << offset << ": "
              << sanscan::to_string(ctx) << "\n";
  }
  return kExitClean;
}

int run_gen(const std::string& file, int sink, const std::string& config_path) {
  sanscan::Config cfg = load_config_or_default(config_path);
  std::string text = read_file(file);
  sanscan::TemplateDoc doc = sanscan::parse_template(
      text, std::filesystem::path(file).filename().string());
  sanscan::InjectionPoint ip = sanscan::infer_injection_point(doc, sink);
  std::cout << "context: " << sanscan::to_string(ip.context) << "\n";
  std::vector<sanscan::AttackVector> vectors = sanscan::generate_vectors(
      ip, cfg.canary, cfg.depth, cfg.candidate_cap);
  if (vectors.empty()) {
    std::cout << "no vector within depth " << cfg.depth << "\n";
    return kExitClean;
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    std::cout << i << ": pre=" << std::quoted(v.pre_escape)
              << " payload=" << std::quoted(v.payload)
              << " post=" << std::quoted(v.post_escape)
              << " full=" << std::quoted(v.full) << "\n";
  }
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sanscan: context-aware XSS sanitization checker"};
  app.require_subcommand(1);

  std::string scan_dir, scan_config, scan_json;
  bool scan_quiet = false;
  CLI::App* scan = app.add_subcommand(
      "scan", "Scan a corpus directory of .san.html files");
  scan->add_option("dir", scan_dir, "corpus directory")->required();
  scan->add_option("--config", scan_config, "JSON config file");
  scan->add_option("--json", scan_json, "write the JSON report here");
  scan->add_flag("--quiet", scan_quiet, "suppress the table");

  std::string ctx_file, ctx_config;
  CLI::App* contexts = app.add_subcommand(
      "contexts", "Print each sink's inferred context stack");
  contexts->add_option("file", ctx_file, "corpus file")->required();
  contexts->add_option("--config", ctx_config, "JSON config file");

  std::string gen_file, gen_config;
  int gen_sink = 0;
  CLI::App* gen = app.add_subcommand(
      "gen", "Print generated attack vectors for one sink");
  gen->add_option("file", gen_file, "corpus file")->required();
  gen->add_option("--sink", gen_sink, "sink index")->required();
  gen->add_option("--config", gen_config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitClean : kExitUsage;
  }

  try {
    if (scan->parsed()) {
      return run_scan(scan_dir, scan_config, scan_json, scan_quiet);
    }
    if (contexts->parsed()) return run_contexts(ctx_file, ctx_config);
    if (gen->parsed()) return run_gen(gen_file, gen_sink, gen_config);
  } catch (const sanscan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sanscan::IoError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const sanscan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
