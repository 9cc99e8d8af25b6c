#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hpmine/literal.hpp"

namespace hpmine {

struct SourceFile {
  std::filesystem::path path;
  std::string text;
};

struct CtorParam {
  std::string name;
  /// nullopt when the parameter has no default at all; Kind::Other when the
  /// default is an expression that is not a literal.
  std::optional<Literal> default_value;
};

/// Docstrings and constructor defaults of one top-level class.
struct ClassDoc {
  std::string class_name;
  std::size_t line = 0;
  std::optional<std::string> class_docstring;
  /// Keys are the subset of {__init__, fit, predict, transform} the class
  /// defines; the value is absent when the method has no docstring.
  std::map<std::string, std::optional<std::string>> method_docstrings;
  /// Constructor parameters in signature order, `self` excluded.
  std::vector<CtorParam> ctor_defaults;
  bool has_init = false;
  /// Non-fatal notes (skipped `*args`, annotations we could not read, ...).
  std::vector<std::string> notes;

  const CtorParam* param(std::string_view name) const;
};

struct SourceError {
  std::string class_name;  // empty when outside any class
  std::size_t line = 0;
  std::string message;
};

struct ScanResult {
  std::vector<ClassDoc> classes;
  /// MalformedSource findings; a class named here is absent from `classes`.
  std::vector<SourceError> errors;
};

class MalformedSignature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extracts every top-level class of a Python module without executing it.
ScanResult scan_source(const SourceFile& src);

struct SignatureParse {
  std::vector<CtorParam> params;
  std::vector<std::string> diagnostics;
};

/// Parses a parenthesized parameter list such as "(self, a=1, *, b='x')".
/// Throws MalformedSignature when brackets or quotes do not balance.
SignatureParse parse_ctor_signature(std::string_view paren_list);

/// Number of `class` statements at column zero outside strings and comments.
std::size_t count_top_level_classes(std::string_view text);

}  // namespace hpmine
