#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hpmine/constraint_cnl.hpp"
#include "hpmine/json.hpp"
#include "hpmine/numpydoc.hpp"
#include "hpmine/source_extractor.hpp"
#include "hpmine/type_cnl.hpp"

namespace hpmine {

/// Machine-readable finding. `location` is "<method>.<arg>" or a method name.
struct Diagnostic {
  std::string kind;
  std::string class_name;
  std::string location;
  std::string message;

  Json to_json() const;
};

namespace diag {
inline constexpr const char* kParseFailure = "ParseFailure";
inline constexpr const char* kMalformedEntry = "MalformedEntry";
inline constexpr const char* kMalformedSource = "MalformedSource";
inline constexpr const char* kUndocumented = "UndocumentedArgument";
inline constexpr const char* kNotInSignature = "DocumentedArgumentNotInSignature";
inline constexpr const char* kDefaultMismatch = "DefaultMismatch";
inline constexpr const char* kDocSignatureDefault = "DocstringSignatureDefaultDisagreement";
inline constexpr const char* kSentinelDefault = "SentinelDefault";
inline constexpr const char* kNonRepresentable = "NonRepresentableDefault";
inline constexpr const char* kUnparseableDefault = "UnparseableDefault";
inline constexpr const char* kIgnoredType = "IgnoredType";
inline constexpr const char* kConstraintTodo = "ConstraintTodo";
inline constexpr const char* kConstraintDuplicate = "DuplicateConstraint";
inline constexpr const char* kSignature = "SignatureNote";
inline constexpr const char* kConflict = "ObservationConflict";
}  // namespace diag

/// One documented argument after type parsing and lowering.
struct ArgResult {
  ArgDoc doc;
  std::optional<ParsedShortDesc> parsed;
  std::optional<ParseFailure> failure;
  Json fragment = Json::object();
  /// Default stated by the docstring, also recovered when the type failed.
  std::optional<Literal> doc_default;
};

ArgResult analyze_arg(const ArgDoc& doc, const std::string& class_name, const std::string& method,
                      std::vector<Diagnostic>& diags);

/// Constraint outcome with the context needed for reporting.
struct ConstraintRecord {
  ConstraintResult result;
  bool duplicate = false;

  Json to_json() const;
};

struct OperatorSchemas {
  std::string class_name;
  Json hyperparams;
  Json input_fit;
  Json input_predict_or_transform;
  Json output;

  Json to_json() const;
  /// Throws std::runtime_error when required members are missing.
  static OperatorSchemas from_json(const Json& j);
};

struct MinedOperator {
  OperatorSchemas schemas;
  std::vector<Diagnostic> diagnostics;
  std::vector<ConstraintRecord> constraints;
  std::vector<ArgResult> args;  // constructor arguments as documented
};

/// Builds the hyperparameter document from lowered arguments and flagged
/// constraint sentences. Properties follow the constructor signature; when
/// the class has no `__init__` the documented order is used. Constraint
/// outcomes are appended to `records`, one per candidate.
Json assemble_hyperparams(const ClassDoc& cls, const std::vector<ArgResult>& args,
                          const std::vector<CandidateSentence>& candidates, std::vector<ConstraintRecord>& records,
                          std::vector<Diagnostic>& diags);

/// Object schema for a method's Parameters section; `{}` when absent.
Json io_fragment(const std::vector<Section>& sections, const std::string& class_name, const std::string& method,
                 std::vector<Diagnostic>& diags);

/// Schema for a Returns section; `{}` when absent.
Json output_fragment(const std::vector<Section>& sections, const std::string& class_name, const std::string& method,
                     std::vector<Diagnostic>& diags);

/// Full mining of one class: docstring sections, types, constraints, and
/// assembly.
MinedOperator mine_class(const ClassDoc& cls, const Triggers& triggers);

/// Reorders the keys of a property schema (and nested schemas) into the
/// fixed serialization order.
Json canonical_order(const Json& schema);

/// Serialized form written to disk: two-space indent, trailing newline.
std::string dump_document(const Json& j);

/// Loose equality of literals: numbers compare by value.
bool same_value(const Literal& a, const Literal& b);

}  // namespace hpmine
