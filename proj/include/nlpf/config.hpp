#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "nlpf/stepper.hpp"

namespace nlpf {

/// Raw "section.key" -> value table of a config file, with source lines.
struct ConfigTable {
  struct Entry {
    std::string value;
    int line = 0;  // 0 for command-line overrides
  };
  std::map<std::string, Entry> entries;

  /// Parses `[section]` headers and `key = value` lines; `#` starts a comment.
  static ConfigTable parse(std::istream& is);
  static ConfigTable load(const std::string& path);

  /// Applies "section.key=value"; throws ConfigError if malformed.
  void apply_override(const std::string& assignment);
};

/// Builds and validates a RunConfig. Unknown keys and missing required
/// keys throw ConfigError naming the key.
RunConfig build_run_config(const ConfigTable& table);

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

/// Writes a config file that load_run_config reads back to `config`.
void write_config(std::ostream& os, const RunConfig& config);

std::string_view to_string(ConvolutionMode mode);
ConvolutionMode parse_convolution_mode(std::string_view s);

}  // namespace nlpf
