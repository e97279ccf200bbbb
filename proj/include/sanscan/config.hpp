#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sanscan/errors.hpp"
#include "sanscan/sanitizers.hpp"

namespace sanscan {

struct Config {
  std::string canary = "alert";
  int depth = 3;
  int candidate_cap = 10000;
  std::vector<SanitizerSpec> custom_sanitizers;
  std::map<std::string, std::string> sanitizer_aliases;
};

namespace cfgdetail {

inline SanitizerSpec parse_sanitizer_decl(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw ConfigError("sanitizer declaration must be an object");
  std::string id;
  std::vector<std::pair<char, std::string>> map;
  std::string allow;
  bool has_map = false;
  bool has_allow = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      if (!value.is_string()) throw ConfigError("sanitizer id must be a string");
      id = value.get<std::string>();
    } else if (key == "map") {
      if (!value.is_object()) throw ConfigError("sanitizer map must be an object");
      for (const auto& [from, to] : value.items()) {
        if (from.size() != 1) {
          throw ConfigError("sanitizer map keys must be single characters");
        }
        if (!to.is_string()) {
          throw ConfigError("sanitizer map values must be strings");
        }
        map.emplace_back(from[0], to.get<std::string>());
      }
      has_map = true;
    } else if (key == "allow") {
      if (!value.is_string()) throw ConfigError("allow must be a string");
      allow = value.get<std::string>();
      has_allow = true;
    } else {
      throw ConfigError("unknown key in sanitizer declaration: " + key);
    }
  }
  if (id.empty()) throw ConfigError("sanitizer declaration needs an id");
  if (has_map == has_allow) {
    throw ConfigError("sanitizer " + id + " needs exactly one of map/allow");
  }
  if (has_map) return SanitizerSpec::make_char_map(id, std::move(map));
  return SanitizerSpec::make_allowlist(id, allow);
}

}  // namespace cfgdetail

// Loads the JSON config. Absent fields take their defaults; an unknown
// key is a hard error, never silently ignored.
inline Config parse_config(const nlohmann::ordered_json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Config cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "canary") {
      if (!value.is_string() || value.get<std::string>().empty()) {
        throw ConfigError("canary must be a nonempty string");
      }
      cfg.canary = value.get<std::string>();
    } else if (key == "depth") {
      if (!value.is_number_integer() || value.get<int>() < 1) {
        throw ConfigError("depth must be an integer >= 1");
      }
      cfg.depth = value.get<int>();
    } else if (key == "candidate_cap") {
      if (!value.is_number_integer() || value.get<int>() < 1) {
        throw ConfigError("candidate_cap must be an integer >= 1");
      }
      cfg.candidate_cap = value.get<int>();
    } else if (key == "custom_sanitizers") {
      if (!value.is_array()) throw ConfigError("custom_sanitizers must be an array");
      for (const auto& decl : value) {
        cfg.custom_sanitizers.push_back(cfgdetail::parse_sanitizer_decl(decl));
      }
    } else if (key == "sanitizer_aliases") {
      if (!value.is_object()) throw ConfigError("sanitizer_aliases must be an object");
      for (const auto& [name, target] : value.items()) {
        if (!target.is_string()) throw ConfigError("alias target must be a string");
        cfg.sanitizer_aliases[name] = target.get<std::string>();
      }
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

// Registry for a config: builtins, then custom sanitizers, then aliases
// (aliases resolve only after customs are registered).
inline SanitizerRegistry build_registry(const Config& cfg) {
  SanitizerRegistry reg;
  for (const auto& spec : cfg.custom_sanitizers) {
    reg = reg.with_custom(spec);
  }
  for (const auto& [name, id] : cfg.sanitizer_aliases) {
    reg = reg.with_alias(name, id);
  }
  return reg;
}

}  // namespace sanscan
