#pragma once

#include <string>
#include <vector>

#include "hpmine/json.hpp"

namespace hpmine {

/// JSON Schema draft-04 validation. `format` is ignored; `$ref` resolves JSON
/// pointers within the root document and the draft-04 metaschema URI.
struct ValidationError {
  std::string instance_path;
  std::string schema_path;
  std::string message;
};

class SchemaValidator {
 public:
  explicit SchemaValidator(Json schema);

  std::vector<ValidationError> validate(const Json& instance) const;
  bool is_valid(const Json& instance) const;

 private:
  Json root_;
};

inline constexpr const char* kDraft04Uri = "http://json-schema.org/draft-04/schema#";

const Json& draft04_metaschema();

/// Errors of `schema` against the draft-04 metaschema.
std::vector<ValidationError> check_metaschema(const Json& schema);

/// Validates one instance against a (sub)schema that has no external refs.
bool validates(const Json& schema, const Json& instance);

/// Integral JSON number (draft-04 reads 1.0 as a number but not an integer).
bool is_json_integer(const Json& j);

}  // namespace hpmine
