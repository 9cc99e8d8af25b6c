#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpmine/json.hpp"
#include "hpmine/literal.hpp"
#include "hpmine/schema_assembler.hpp"

namespace hpmine {

enum class Verdict { Accepted, Rejected, Timeout };

struct HarvestedValue {
  Json value;
  Verdict verdict = Verdict::Accepted;
  std::string message;
};

struct NumericBound {
  std::optional<Json> min;
  std::optional<bool> min_exclusive;
  std::optional<Json> max;
  std::optional<bool> max_exclusive;
};

/// Findings of the dynamic analysis for one class.
struct ObservationSet {
  std::string class_name;
  std::string class_path;
  std::map<std::string, Literal> observed_defaults;
  std::map<std::string, std::vector<HarvestedValue>> harvested_enums;
  std::map<std::string, NumericBound> numeric_bounds;
  std::map<std::string, std::vector<std::string>> exception_notes;
  std::vector<std::string> notes;

  /// Validates against the published schema first; throws std::runtime_error.
  static ObservationSet from_json(const Json& j);
  Json to_json() const;
};

/// The published observation file schema.
const Json& observation_schema();

struct ArgOverride {
  std::optional<Json> schema;
  std::optional<bool> exclude_from_optimizer;
  std::optional<std::string> distribution;
  std::optional<Json> minimum_for_optimizer;
  std::optional<Json> maximum_for_optimizer;
  std::optional<std::vector<Json>> blacklist;
};

/// User overrides keyed "ClassName.arg".
class Overrides {
 public:
  /// Throws std::runtime_error on unknown keys or ill-typed values.
  static Overrides from_json(const Json& j);

  const ArgOverride* find(const std::string& class_name, const std::string& arg) const;
  /// Entries for one class, in file order.
  std::vector<std::pair<std::string, const ArgOverride*>> for_class(const std::string& class_name) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<std::pair<std::pair<std::string, std::string>, ArgOverride>> entries_;
};

struct RefineOptions {
  std::vector<std::string> optimizer_blocklist = {"verbose", "n_jobs", "random_state", "copy",
                                                  "warm_start", "cache_size", "max_iter"};
  std::vector<std::string> loguniform_names = {"C", "alpha", "tol", "learning_rate"};
  double distribution_ratio = 100.0;
};

struct RefineResult {
  OperatorSchemas schemas;
  std::vector<Diagnostic> diagnostics;  // conflicts and default checks
};

/// Applies observations (optional) and overrides to a raw operator document.
/// Throws std::invalid_argument when the observation names another class.
RefineResult refine(const OperatorSchemas& raw, const ObservationSet* obs, const Overrides& ov,
                    const RefineOptions& opts = {});

}  // namespace hpmine
