#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpmine/json.hpp"
#include "hpmine/schema_assembler.hpp"

namespace hpmine {

struct CategoryCounts {
  long reference = 0;
  long generated = 0;
  long match = 0;
  /// Constraints only: lowered plus TODO placeholders.
  std::optional<long> detected;

  double precision() const;
  double recall() const;
  double f1() const;
  void add(const CategoryCounts& o);
  Json to_json() const;
};

/// Category names in report order.
const std::vector<std::string>& eval_categories();

/// A count split into what the docstring gave and what refinement added.
struct Attributed {
  long total = 0;
  long parser = 0;
  long refiner = 0;
  void add(const Attributed& o);
};

struct Coverage {
  long classes = 0;
  long arguments = 0;
  Attributed types;
  Attributed defaults;
  Attributed ranges;
  long range_relevant = 0;  // numeric arguments and enum/string arguments
  long constraints_valid = 0;
  long constraints_detected = 0;

  void add(const Coverage& o);
  Json to_json() const;
};

struct EvalRow {
  std::string class_name;
  std::map<std::string, CategoryCounts> categories;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::map<std::string, CategoryCounts> totals;
  Coverage coverage;
  bool has_coverage = false;
  std::vector<std::string> unpaired_generated;
  std::vector<std::string> unpaired_curated;

  Json to_json() const;
  std::string to_table() const;
};

/// Constructor-argument comparison of one class.
EvalRow compare(const OperatorSchemas& generated, const OperatorSchemas& curated);

/// Sums counts over rows (micro-averaging).
EvalReport aggregate(std::vector<EvalRow> rows);

/// Summary counts of a generated document; `raw` (before refinement)
/// attributes each finding to the parser or the refiner.
Coverage coverage_of(const OperatorSchemas& generated, const OperatorSchemas* raw = nullptr);

/// Type-only projection used for type matching: extension metadata, bounds,
/// defaults and descriptions dropped, unions flattened and sorted.
Json type_projection(const Json& schema);

/// Tightest interval from hard and optimizer bounds.
struct Interval {
  std::optional<double> lo;
  bool lo_exclusive = false;
  std::optional<double> hi;
  bool hi_exclusive = false;
};
std::optional<Interval> range_of(const Json& schema);
bool interval_within(const Interval& inner, const Interval& outer);

/// Equality with integer/float coercion and relative tolerance 1e-9.
bool values_equal(const Json& a, const Json& b);

class SchemaLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads an operator document, or a bare hyperparameter schema whose class
/// name is the file stem. Throws SchemaLoadError.
OperatorSchemas load_operator_document(const std::filesystem::path& path);

/// Operator documents under a directory keyed by class name.
std::map<std::string, OperatorSchemas> load_operator_dir(const std::filesystem::path& dir);

EvalReport evaluate_dirs(const std::filesystem::path& generated, const std::filesystem::path& curated,
                         const std::optional<std::filesystem::path>& raw = std::nullopt);

}  // namespace hpmine
