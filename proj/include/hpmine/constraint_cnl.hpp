#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hpmine/json.hpp"
#include "hpmine/literal.hpp"
#include "hpmine/numpydoc.hpp"

namespace hpmine {

struct CandidateSentence {
  std::string owner_arg;
  std::string text;     // bullet marker removed, otherwise verbatim
  std::string trigger;  // pattern that flagged it
};

/// Splits a long description into sentences. A `.` ends a sentence when it
/// is followed by whitespace and an uppercase letter or bullet, or by the end
/// of the text; bullet lines start a new sentence and blank lines end one.
std::vector<std::string> split_sentences(std::string_view long_desc);

class Triggers {
 public:
  Triggers();  // default patterns
  explicit Triggers(std::vector<std::string> patterns);

  /// First pattern matching the sentence, or nullptr.
  const std::string* match(std::string_view sentence) const;
  const std::vector<std::string>& patterns() const { return patterns_; }

  static std::vector<std::string> default_patterns();

 private:
  std::vector<std::string> patterns_;
  std::vector<std::regex> compiled_;
};

std::vector<CandidateSentence> flag_candidates(const ArgDoc& arg, const Triggers& triggers);

enum class CompareOp { Eq, Assign, Gt, Lt, Ge, Le, IsSetTo, Is };

std::string_view compare_op_text(CompareOp op);

struct Cond {
  enum class Kind { Atom, SeqAtom, And, Or };
  Kind kind = Kind::Atom;
  std::string name;             // Atom, SeqAtom
  CompareOp op = CompareOp::Eq; // Atom
  std::vector<Literal> values;  // Atom, SeqAtom
  std::vector<Cond> children;   // And, Or (two each)

  friend bool operator==(const Cond&, const Cond&) = default;
};

/// `only when cond`
struct OnlyWhen {
  std::optional<std::string> only_verb;
  std::string when_word;
  Cond cond;
};

/// `Solvers 'sag' and 'lbfgs' support only l2.` Premise values for the named
/// argument restrict the conclusion values.
struct SupportsOnly {
  std::string premise_name;
  std::vector<Literal> premise;
  std::vector<Literal> conclusion;
  std::optional<std::string> conclusion_name;
};

struct ConstraintAst {
  std::variant<OnlyWhen, SupportsOnly> form;
  bool is_extension() const { return std::holds_alternative<SupportsOnly>(form); }
};

struct ConstraintParseFailure {
  std::string message;
};

std::variant<ConstraintAst, ConstraintParseFailure> parse_constraint(std::string_view sentence);

/// Compact rendering for tests and diagnostics, e.g. "and(solver=['sgd'],...)".
std::string describe(const Cond& c);

/// What lowering needs to know about the operator's arguments.
struct ConstraintContext {
  std::string owner;
  std::optional<Literal> owner_default;
  /// Documented argument names with their lowered schemas, in order.
  std::vector<std::pair<std::string, Json>> args;
};

struct ConstraintResult {
  enum class Kind { Lowered, Todo };
  Kind kind = Kind::Todo;
  CandidateSentence source;
  Json schema;         // lowered fragment or TODO placeholder
  std::string reason;  // why it is a Todo
  bool extension = false;
};

/// Placeholder kept in the schema for a sentence that could not be lowered.
Json todo_placeholder(std::string_view sentence);

/// Sentence text used as a lowered constraint's description: quotes dropped.
std::string constraint_description(std::string_view sentence);

ConstraintResult lower_constraint(const CandidateSentence& c, const ConstraintAst& ast, const ConstraintContext& ctx);

/// Parses and lowers; every candidate yields exactly one result.
ConstraintResult process_candidate(const CandidateSentence& c, const ConstraintContext& ctx);

}  // namespace hpmine
