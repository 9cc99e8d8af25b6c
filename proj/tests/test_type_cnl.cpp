#include <doctest.h>

#include <random>

#include "corpus.hpp"
#include "hpmine/json_schema.hpp"
#include "hpmine/type_cnl.hpp"

using namespace hpmine;

namespace {

ParsedShortDesc parse_ok(std::string_view s) {
  auto r = parse_short_desc(s);
  REQUIRE_MESSAGE(std::holds_alternative<ParsedShortDesc>(r), s);
  return std::get<ParsedShortDesc>(r);
}

}  // namespace

TEST_CASE("grammar corpus") {
  auto corpus = testing::load_corpus();
  CHECK(corpus.size() >= 30);
  for (const auto& c : corpus) {
    CAPTURE(c.line_no);
    CAPTURE(c.desc);
    CHECK(testing::check_corpus_line(c) == "");
  }
}

TEST_CASE("tokenizer drops quotes, backticks and backslashes") {
  auto t = tokenize("str, {'a b', ``c``} \\ default=\"x\"");
  std::vector<std::string> texts;
  for (const auto& tok : t) texts.push_back(tok.text);
  CHECK(texts == std::vector<std::string>{"str", ",", "{", "a b", ",", "c", "}", "default", "=", "x"});
  CHECK(t[3].kind == TokenKind::Quoted);
  CHECK(t[0].begin == 0);
  CHECK(t[0].end == 3);
  CHECK(token_literal(t[3]) == Literal::string("a b"));
  CHECK(token_literal(Token{TokenKind::Word, "None", 0, 4}) == Literal::none());
  CHECK(token_literal(Token{TokenKind::Number, "0.5", 0, 3}) == Literal::real(0.5));
}

TEST_CASE("lowering the logistic regression lines") {
  auto solver = lower_type(parse_ok("str, {'linear', 'sag', 'lbfgs'}, optional (default='linear')."),
                           "Algorithm for optimization.\n- Solvers 'sag' and 'lbfgs' support only l2.");
  CHECK(solver.schema.dump() ==
        R"({"description":"Algorithm for optimization.","enum":["linear","sag","lbfgs"],"default":"linear"})");
  auto penalty = lower_type(parse_ok("str, 'l1' or 'l2', default: 'l2'"),
                            "Norm used in the penalization.\nThe 'sag' and 'lbfgs' solvers support\nonly l2 penalties.");
  CHECK(penalty.schema.dump() == R"({"description":"Norm used in the penalization.","enum":["l1","l2"],"default":"l2"})");
  auto c = lower_type(parse_ok("float, default: 1.0"), "Inverse regularization strength;\nmust be a positive float.");
  CHECK(c.schema.dump() == R"({"description":"Inverse regularization strength.","type":"number","default":1.0})");
}

TEST_CASE("lowering details") {
  CHECK(lower_type_expr(parse_ok("int or None").types).dump() == R"({"anyOf":[{"type":"integer"},{"enum":[null]}]})");
  CHECK(lower_type_expr(parse_ok("{'a', 'b'} or None").types).dump() == R"({"anyOf":[{"enum":["a","b"]},{"enum":[null]}]})");
  CHECK(lower_type_expr(parse_ok("bool").types).dump() == R"({"type":"boolean"})");
  auto ignored = lower_type(parse_ok("Ignored"));
  CHECK(ignored.schema.dump() == R"({"enum":[null]})");
  REQUIRE(ignored.notes.size() == 1);
  CHECK(ignored.notes[0] == "type 'Ignored' lowered to null");
  auto nan = lower_type(parse_ok("float, default=nan"));
  CHECK(nan.schema["default"].is_null());
  CHECK(nan.notes.size() == 1);
}

TEST_CASE("make_union flattens and merges") {
  TypeExpr i{PrimType{PrimKind::Integer}};
  TypeExpr e1{EnumType{{Literal::string("a")}}};
  TypeExpr e2{EnumType{{Literal::string("b"), Literal::string("a")}}};
  TypeExpr u = make_union({i, make_union({e1, i}), e2});
  CHECK(describe(u) == "anyOf[integer,enum['a','b']]");
  CHECK(describe(make_union({i})) == "integer");
}

TEST_CASE("first sentence") {
  CHECK(first_sentence("Inverse regularization strength;\nmust be positive.") == "Inverse regularization strength.");
  CHECK(first_sentence("Seed used. More text.") == "Seed used.");
  CHECK(first_sentence("No period") == "No period.");
  CHECK(first_sentence("Intro line\n- bullet") == "Intro line.");
  CHECK(first_sentence("") == "");
}

TEST_CASE("default clause salvaged from a rejected description") {
  auto toks = tokenize("'auto' or a list of lists/arrays of values, default='auto'.");
  CHECK(std::holds_alternative<ParseFailure>(parse_short_desc(toks)));
  auto d = salvage_default(toks);
  REQUIRE(d);
  CHECK(*d == Literal::string("auto"));
  CHECK_FALSE(salvage_default(tokenize("list of str")).has_value());
}

TEST_CASE("failures locate the offending token") {
  std::string s = "list of str";
  auto r = parse_short_desc(s);
  auto* f = std::get_if<ParseFailure>(&r);
  REQUIRE(f);
  CHECK(s.substr(f->fail_begin, f->fail_end - f->fail_begin) == "str");
}

TEST_CASE("random token soup never crashes and lowers to valid schemas") {
  static const std::vector<std::string> words = {
      "int", "float", "str", "string", "None", "or", ",", "optional", "default", "=", ":", "(", ")", "{", "}",
      "[", "]", "|", "'a'", "'b'", "1", "2.5", "array-like", "shape", "of", "n_samples", "by", "RandomState",
      "instance", "sparse", "matrix", ".", "a", "an", "Ignored", "callable", "`x`", "\\", "\"q\""};
  std::mt19937_64 rng(3);
  const Json& meta = draft04_metaschema();
  SchemaValidator v(meta);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int k = 0; k < n; ++k) s += words[rng() % words.size()] + " ";
    CAPTURE(s);
    auto r = parse_short_desc(s);
    if (auto* p = std::get_if<ParsedShortDesc>(&r)) {
      auto low = lower_type(*p, "Some text.");
      CHECK(v.is_valid(low.schema));
    }
  }
}
