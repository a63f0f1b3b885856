#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace capcorpus {

using ConfigValues = std::map<std::string, std::string>;

// Flat `key = value` file. '#' starts a comment outside quotes, values may be
// double-quoted, and `[section]` headers are accepted but do not namespace
// keys. Throws ConfigError with the offending line number.
ConfigValues parse_config(std::string_view text);
ConfigValues load_config(const std::filesystem::path& path);

inline constexpr std::string_view kEnvPrefix = "CAPCORPUS_";

// For every key in `known`, CAPCORPUS_<KEY> (upper-cased) overrides the value
// when the variable is set.
void apply_env_overrides(ConfigValues& values, const std::vector<std::string>& known);

}  // namespace capcorpus
