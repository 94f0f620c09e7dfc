#pragma once

#include <stdexcept>
#include <string>

namespace nlpf {

/// Raised for invalid parameters, malformed inputs and solver breakdown.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration problems carry the offending key (and line, when known).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what, int line = 0)
      : Error(format(key, what, line)), key_(key), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, const std::string& what,
                            int line) {
    std::string msg = "config";
    if (line > 0) msg += " line " + std::to_string(line);
    if (!key.empty()) msg += " [" + key + "]";
    return msg + ": " + what;
  }

  std::string key_;
  int line_ = 0;
};

}  // namespace nlpf
