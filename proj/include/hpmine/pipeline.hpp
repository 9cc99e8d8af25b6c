#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpmine/config.hpp"
#include "hpmine/json.hpp"
#include "hpmine/schema_assembler.hpp"

namespace hpmine {

/// `.py` files under the given files and directories, sorted, deduplicated.
std::vector<std::filesystem::path> collect_sources(const std::vector<std::filesystem::path>& inputs);

/// Dotted module path of `file` relative to `root`'s parent directory, e.g.
/// root "sklearn", file "sklearn/linear_model/_logistic.py" gives
/// "sklearn.linear_model._logistic". `__init__.py` names its package.
std::string module_path(const std::filesystem::path& file, const std::filesystem::path& root);

struct MineOptions {
  std::optional<std::string> library;  // overrides the config
  bool write_schemas = true;
  bool write_plans = true;
};

struct MinedClass {
  std::string class_path;
  std::string library;
  std::filesystem::path source;
  MinedOperator op;
  std::string status;  // written, excluded, malformed
  std::string reason;
  std::filesystem::path output;
};

struct MineRun {
  std::vector<MinedClass> classes;
  std::vector<std::string> skipped_files;
  std::vector<std::pair<std::filesystem::path, SourceError>> malformed;
  Json diagnostics;
  int schemas_written = 0;
};

/// Scans, mines, and writes `<out>/<library>/<Class>.json`,
/// `<out>/plans/<Class>.plan.json` and `<out>/diagnostics.json`.
MineRun run_mine(const std::vector<std::filesystem::path>& inputs, const Config& cfg,
                 const std::filesystem::path& out, const MineOptions& opts = {});

/// Probe plan for one mined class; `pool` holds string values documented
/// for each argument name across all mined classes, in class-name order.
Json make_plan(const MinedClass& cls, const std::map<std::string, std::vector<Json>>& pool);

struct RefineRun {
  int refined = 0;
  int with_observations = 0;
  Json diagnostics;
};

/// Refines every operator document under `raw`, writing the results to the
/// same relative paths under `out`.
RefineRun run_refine(const std::filesystem::path& raw, const std::optional<std::filesystem::path>& observations,
                     const std::optional<std::filesystem::path>& overrides, const Config& cfg,
                     const std::filesystem::path& out);

/// Observation files under a directory keyed by class name.
std::map<std::string, ObservationSet> load_observations(const std::filesystem::path& dir);

Overrides load_overrides(const std::filesystem::path& file);

/// Writes text atomically enough for our purposes: parent directories are
/// created and the file is replaced.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// Verbosity from HPMINE_VERBOSE (0 quiet, 1 progress, 2 debug).
int log_level();
void log(int level, const std::string& msg);

}  // namespace hpmine
