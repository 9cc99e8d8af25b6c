#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "hpmine/json.hpp"

namespace hpmine {

/// A literal value as it appears in source or documentation text.
struct Literal {
  enum class Kind { Number, String, Boolean, None, Other };

  Kind kind = Kind::Other;
  std::variant<std::monostate, std::int64_t, double, bool, std::string> value;
  std::string raw;

  static Literal integer(std::int64_t v, std::string raw = {});
  static Literal real(double v, std::string raw = {});
  static Literal string(std::string v, std::string raw = {});
  static Literal boolean(bool v, std::string raw = {});
  static Literal none(std::string raw = "None");
  static Literal other(std::string raw);

  bool is_number() const { return kind == Kind::Number; }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(value); }
  bool is_string() const { return kind == Kind::String; }
  /// Numbers only.
  double as_double() const;
  const std::string& as_string() const { return std::get<std::string>(value); }
  /// NaN and infinities have no JSON encoding.
  bool is_representable() const;

  friend bool operator==(const Literal& a, const Literal& b) { return a.kind == b.kind && a.value == b.value; }
};

/// Decodes a Python expression that is a plain literal. Anything that would
/// require evaluation comes back as Kind::Other carrying the raw text. The
/// handful of well-known non-finite spellings (np.nan, float('inf'), ...)
/// decode to non-finite numbers.
Literal decode_python_literal(std::string_view text);

/// Renders a literal back as a Python token. Kind::Other returns raw.
std::string render_python(const Literal& lit);

/// JSON encoding; nullopt for Kind::Other and non-finite numbers.
std::optional<Json> to_json(const Literal& lit);
Literal literal_from_json(const Json& j);

}  // namespace hpmine
