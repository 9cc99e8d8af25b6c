#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpmine/json.hpp"
#include "hpmine/refiner.hpp"

namespace hpmine {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings read from the `--config` JSON file. Relative paths are resolved
/// against the directory holding the file.
struct Config {
  std::optional<std::string> library;
  std::vector<std::string> include = {"*"};
  std::vector<std::string> exclude;
  std::vector<std::string> triggers;
  RefineOptions refine;
  std::optional<std::filesystem::path> overrides;
  std::optional<std::filesystem::path> observations;
  std::optional<std::filesystem::path> output;

  Config();

  static Config load(const std::filesystem::path& file);
  static Config from_json(const Json& j, const std::filesystem::path& base_dir);

  /// Include globs match and no exclude glob does.
  bool selects(const std::string& class_name) const;
};

/// Shell-style wildcard match (`*`, `?`, `[...]`).
bool glob_match(const std::string& pattern, const std::string& name);

}  // namespace hpmine
