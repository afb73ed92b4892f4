/// Command-line front end: config parsing, validation and the six subcommands.
#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gaugelab::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Configuration problem; `field` names the offending key (empty for syntax errors).
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string field, const std::string& msg)
        : std::runtime_error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

  private:
    std::string field_;
};

using ConfigMap = std::map<std::string, std::string>;

/// `key = value` lines ('#' starts a comment), or a flat JSON object when the text starts with '{'.
ConfigMap parse_config_text(const std::string& text);

/// FNV-1a over "command\nkey=value\n..." in key order, as 16 hex digits.
std::string config_hash(const std::string& command, const ConfigMap& cfg);

/// Exit codes: 0 success, 1 failed check or compute error, 2 usage or config error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gaugelab::cli
