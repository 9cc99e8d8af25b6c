#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hpmine/json.hpp"
#include "hpmine/literal.hpp"

namespace hpmine {

enum class TokenKind { Word, Number, Punct, Quoted };

/// Lexeme of a documentation phrase. Quote characters, backticks, backslashes
/// and whitespace are filtered out during lexing.
struct Token {
  TokenKind kind = TokenKind::Word;
  std::string text;  // quotes removed for Quoted
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

std::vector<Token> tokenize(std::string_view desc);

/// A value token as a literal: quoted text is a string, numbers decode, and
/// bare words go through Python literal decoding (None, True, ...) falling
/// back to a string.
Literal token_literal(const Token& tok);

enum class PrimKind { Integer, Number, Boolean, String, None, Callable, Dict, TypeObject, Ignored };

struct TypeExpr;

struct PrimType {
  PrimKind kind;
  friend bool operator==(const PrimType&, const PrimType&) = default;
};

struct ObjType {
  friend bool operator==(const ObjType&, const ObjType&) = default;
};

struct Shape {
  std::vector<std::string> dims;
  bool none = false;  // the literal `None` shape
  friend bool operator==(const Shape&, const Shape&) = default;
};

struct ArrayType {
  std::vector<std::string> atype;  // normalized spellings, e.g. "array-like", "sparse matrix"
  std::vector<Shape> shapes;       // alternatives joined by "or"
  friend bool operator==(const ArrayType&, const ArrayType&) = default;
};

struct EnumType {
  std::vector<Literal> values;
  friend bool operator==(const EnumType&, const EnumType&) = default;
};

struct AnyOfType {
  std::vector<TypeExpr> members;
  friend bool operator==(const AnyOfType&, const AnyOfType&);
};

struct TypeExpr {
  std::variant<PrimType, ObjType, ArrayType, EnumType, AnyOfType> node;
  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
};

struct ParsedShortDesc {
  TypeExpr types;
  bool optional_flag = false;
  std::optional<Literal> default_value;
};

struct ParseFailure {
  std::size_t prefix_tokens = 0;  // tokens consumed by the longest partial parse
  std::size_t fail_begin = 0;     // character span of the offending token
  std::size_t fail_end = 0;
  std::string message;
};

using ShortDescResult = std::variant<ParsedShortDesc, ParseFailure>;

ShortDescResult parse_short_desc(const std::vector<Token>& tokens);
inline ShortDescResult parse_short_desc(std::string_view desc) { return parse_short_desc(tokenize(desc)); }

/// Recovers a trailing default clause from a description the full grammar
/// rejects, e.g. "'auto' or a list of values, default='auto'".
std::optional<Literal> salvage_default(const std::vector<Token>& tokens);

/// Combines members into one expression: nested unions are flattened,
/// enumerations are merged and duplicates dropped. A single member is
/// returned as is.
TypeExpr make_union(std::vector<TypeExpr> members);

/// Compact rendering used by diagnostics and test fixtures, e.g.
/// "anyOf[integer,enum['a','b'],none]".
std::string describe(const TypeExpr& t);

struct LoweredType {
  Json schema;
  std::vector<std::string> notes;
};

/// JSON Schema fragment for a parsed short description. When `long_desc` is
/// non-empty its first sentence becomes the description.
LoweredType lower_type(const ParsedShortDesc& p, std::string_view long_desc = {});

/// Schema for the type part alone.
Json lower_type_expr(const TypeExpr& t);

/// First sentence of a long description, terminated with a period. A
/// semicolon or a bullet line also ends the sentence.
std::string first_sentence(std::string_view long_desc);

}  // namespace hpmine
