#include <doctest.h>

#include <random>

#include "hpmine/constraint_cnl.hpp"
#include "hpmine/json_schema.hpp"

using namespace hpmine;

namespace {

ConstraintAst parse_ok(std::string_view s) {
  auto r = parse_constraint(s);
  REQUIRE_MESSAGE(std::holds_alternative<ConstraintAst>(r), s);
  return std::get<ConstraintAst>(r);
}

std::string cond_of(std::string_view s) {
  auto ast = parse_ok(s);
  return describe(std::get<OnlyWhen>(ast.form).cond);
}

ConstraintContext mlp_context() {
  ConstraintContext ctx;
  ctx.owner = "power_t";
  ctx.owner_default = Literal::real(0.5);
  ctx.args = {{"solver", Json::parse(R"({"enum":["lbfgs","sgd","adam"]})")},
              {"learning_rate", Json::parse(R"({"enum":["constant","invscaling","adaptive"]})")},
              {"power_t", Json::parse(R"({"type":"number"})")},
              {"momentum", Json::parse(R"({"type":"number"})")}};
  return ctx;
}

ConstraintContext logistic_context(const std::string& owner) {
  ConstraintContext ctx;
  ctx.owner = owner;
  ctx.args = {{"solver", Json::parse(R"({"enum":["linear","sag","lbfgs"]})")},
              {"penalty", Json::parse(R"({"enum":["l1","l2"]})")},
              {"C", Json::parse(R"({"type":"number"})")}};
  return ctx;
}

}  // namespace

TEST_CASE("sentence splitting") {
  auto s = split_sentences(
      "It is used in updating effective learning rate when\nthe learning_rate is set to 'invscaling'.\n"
      "Only used when solver='sgd'.");
  REQUIRE(s.size() == 2);
  CHECK(s[1] == "Only used when solver='sgd'.");
  auto b = split_sentences("Algorithm for optimization.\n- Solvers 'sag' and 'lbfgs' support only l2.");
  REQUIRE(b.size() == 2);
  CHECK(b[1] == "Solvers 'sag' and 'lbfgs' support only l2.");
  // e.g. and 1.5 do not end sentences
  CHECK(split_sentences("Use e.g. 1.5 here. Next one.").size() == 2);
  CHECK(split_sentences("").empty());
}

TEST_CASE("candidates are flagged by trigger patterns") {
  Triggers t;
  ArgDoc power_t{"power_t", "double, default 0.5",
                 "The exponent for inverse scaling learning rate.\n"
                 "It is used in updating effective learning rate when\nthe learning_rate is set to 'invscaling'.\n"
                 "Only used when solver='sgd'."};
  auto c = flag_candidates(power_t, t);
  REQUIRE(c.size() == 1);
  CHECK(c[0].owner_arg == "power_t");
  CHECK(c[0].text == "Only used when solver='sgd'.");
  CHECK_FALSE(c[0].trigger.empty());

  ArgDoc plain{"C", "float", "Inverse regularization strength; must be a positive float."};
  CHECK(flag_candidates(plain, t).empty());

  Triggers custom({"\\bignored\\b"});
  CHECK(flag_candidates(power_t, custom).empty());
  CHECK(custom.match("this is ignored") != nullptr);
}

TEST_CASE("only-when conditions") {
  CHECK(cond_of("Only used when solver='sgd'.") == "solver=['sgd']");
  CHECK(cond_of("only effective when solver == 'sgd' or 'adam'") == "solver==['sgd','adam']");
  CHECK(cond_of("Only used when solver='sgd' and momentum > 0.") == "and(solver=['sgd'],momentum>[0])");
  CHECK(cond_of("Only applies if penalty is set to 'elasticnet'.") == "penalty is set to ['elasticnet']");
  CHECK(cond_of("only when the 'sgd' solver is used") == "['sgd'] solver");
  CHECK(cond_of("Only used if a = 1 or b = 2 and c = 3") == "or(a=[1],and(b=[2],c=[3]))");
  CHECK(cond_of("only used when x >= 1") == "x>=[1]");
  CHECK(cond_of("only used when x <= 1") == "x<=[1]");
  auto ast = parse_ok("Only significant in 'poly' and 'sigmoid' kernel.");
  CHECK(std::get<OnlyWhen>(ast.form).when_word == "in");
  CHECK_FALSE(ast.is_extension());
}

TEST_CASE("supports-only sentences") {
  auto ast = parse_ok("Solvers 'sag' and 'lbfgs' support only l2.");
  REQUIRE(ast.is_extension());
  const auto& s = std::get<SupportsOnly>(ast.form);
  CHECK(s.premise_name == "Solvers");
  CHECK(s.premise == std::vector<Literal>{Literal::string("sag"), Literal::string("lbfgs")});
  CHECK(s.conclusion == std::vector<Literal>{Literal::string("l2")});
  CHECK_FALSE(s.conclusion_name.has_value());

  auto named = parse_ok("The 'sag' and 'lbfgs' solvers support only l2 penalties.");
  CHECK(std::get<SupportsOnly>(named.form).conclusion_name == "penalties");
}

TEST_CASE("rejected sentences") {
  for (const char* s : {"This is only a note.", "Used only when needed", "only", "Only used when", "only when x ="}) {
    CAPTURE(s);
    CHECK(std::holds_alternative<ConstraintParseFailure>(parse_constraint(s)));
  }
}

TEST_CASE("power_t lowers with the owner pinned to its default") {
  CandidateSentence c{"power_t", "Only used when solver='sgd'.", "\\bonly\\b"};
  auto r = process_candidate(c, mlp_context());
  REQUIRE(r.kind == ConstraintResult::Kind::Lowered);
  CHECK_FALSE(r.extension);
  CHECK(r.schema.dump() ==
        R"({"description":"Only used when solver=sgd.","anyOf":[)"
        R"({"type":"object","properties":{"power_t":{"enum":[0.5]}}},)"
        R"({"type":"object","properties":{"solver":{"enum":["sgd"]}}}]})");
}

TEST_CASE("supports-only lowers to the negated premise") {
  CandidateSentence c{"solver", "Solvers 'sag' and 'lbfgs' support only l2.", "support only"};
  auto r = process_candidate(c, logistic_context("solver"));
  REQUIRE(r.kind == ConstraintResult::Kind::Lowered);
  CHECK(r.extension);
  CHECK(r.schema.dump() ==
        R"({"description":"Solvers sag and lbfgs support only l2.","anyOf":[)"
        R"({"type":"object","properties":{"solver":{"not":{"enum":["sag","lbfgs"]}}}},)"
        R"({"type":"object","properties":{"penalty":{"enum":["l2"]}}}]})");

  // the second phrasing names the conclusion and lands on the same anyOf
  CandidateSentence d{"penalty", "The 'sag' and 'lbfgs' solvers support only l2 penalties.", "support only"};
  auto r2 = process_candidate(d, logistic_context("penalty"));
  REQUIRE(r2.kind == ConstraintResult::Kind::Lowered);
  CHECK(r2.schema["anyOf"] == r.schema["anyOf"]);
}

TEST_CASE("todo placeholders") {
  auto ctx = mlp_context();
  auto unknown = process_candidate({"power_t", "Only used when kernel='rbf'.", "x"}, ctx);
  CHECK(unknown.kind == ConstraintResult::Kind::Todo);
  CHECK(unknown.reason.find("unknown-name") != std::string::npos);
  CHECK(unknown.schema == todo_placeholder("Only used when kernel='rbf'."));
  CHECK(unknown.schema.dump() == R"({"description":"TODO: Only used when kernel='rbf'."})");

  auto prose = process_candidate({"power_t", "This is only a note.", "x"}, ctx);
  CHECK(prose.kind == ConstraintResult::Kind::Todo);

  auto cmp = process_candidate({"power_t", "Only used when momentum > 0 or 1.", "x"}, ctx);
  CHECK(cmp.kind == ConstraintResult::Kind::Todo);
}

TEST_CASE("description strips quotes and backticks") {
  CHECK(constraint_description("Only used when ``solver='sgd'``.") == "Only used when solver=sgd.");
  CHECK(constraint_description("Solvers 'sag'  and \"lbfgs\"") == "Solvers sag and lbfgs");
}

TEST_CASE("every candidate yields one result that is a valid schema") {
  static const std::vector<std::string> words = {"only", "Only", "used", "when", "if", "solver", "=", "==", "'sgd'",
                                                 "'adam'", "and", "or", ">", "0", "momentum", "is", "set", "to",
                                                 "support", "supports", "the", "Solvers", "penalty", "'l2'", ".",
                                                 ",", "learning_rate", "used", "effective"};
  std::mt19937_64 rng(9);
  SchemaValidator v(draft04_metaschema());
  auto ctx = mlp_context();
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    int n = std::uniform_int_distribution<int>(1, 10)(rng);
    for (int k = 0; k < n; ++k) s += words[rng() % words.size()] + " ";
    CAPTURE(s);
    auto r = process_candidate({"power_t", s, "x"}, ctx);
    CHECK(v.is_valid(r.schema));
    if (r.kind == ConstraintResult::Kind::Todo) CHECK(r.schema == todo_placeholder(s));
  }
}
