#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sanscan {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised by the template parser on malformed directives. Positions are
// 1-based and refer to the original source text.
struct SyntaxError : Error {
  int line;
  int col;
  SyntaxError(int line_, int col_, const std::string& msg)
      : Error("syntax error at " + std::to_string(line_) + ":" +
              std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct RecursionError : Error {
  std::string function;
  explicit RecursionError(std::string fn)
      : Error("recursive function call: " + fn), function(std::move(fn)) {}
};

struct MissingSinkValue : Error {
  int sink_index;
  explicit MissingSinkValue(int idx)
      : Error("no value supplied for sink " + std::to_string(idx)),
        sink_index(idx) {}
};

struct UnknownSanitizer : Error {
  std::string id;
  explicit UnknownSanitizer(std::string id_)
      : Error("unknown sanitizer: " + id_), id(std::move(id_)) {}
};

struct DuplicateSanitizer : Error {
  std::string id;
  explicit DuplicateSanitizer(std::string id_)
      : Error("sanitizer already registered: " + id_), id(std::move(id_)) {}
};

struct UnknownCallee : Error {
  std::string name;
  explicit UnknownCallee(std::string name_)
      : Error("call target is neither a sanitizer nor a defined function: " +
              name_),
        name(std::move(name_)) {}
};

struct PathExplosion : Error {
  std::size_t count;
  explicit PathExplosion(std::size_t n)
      : Error("document enumerates more than " + std::to_string(n) +
              " sanitization paths; refusing to continue"),
        count(n) {}
};

struct InlineDepthExceeded : Error {
  explicit InlineDepthExceeded(const std::string& fn)
      : Error("function inlining exceeds depth 8 at: " + fn) {}
};

struct MarkerCollision : Error {
  MarkerCollision() : Error("could not place a unique sink marker") {}
};

struct MissingContext : Error {
  int sink_index;
  explicit MissingContext(int idx)
      : Error("no context supplied for sink " + std::to_string(idx)),
        sink_index(idx) {}
};

struct OffsetOutOfRange : Error {
  OffsetOutOfRange() : Error("offset past end of document") {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  std::string path;
  explicit IoError(std::string path_, const std::string& detail = "")
      : Error("cannot read " + path_ + (detail.empty() ? "" : ": " + detail)),
        path(std::move(path_)) {}
};

}  // namespace sanscan
