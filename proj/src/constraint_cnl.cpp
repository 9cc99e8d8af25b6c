#include "hpmine/constraint_cnl.hpp"

#include <algorithm>
#include <cctype>

#include "hpmine/text.hpp"
#include "hpmine/type_cnl.hpp"

namespace hpmine {

// ---------------------------------------------------------------------------
// Sentences and triggers

namespace {

bool is_bullet(std::string_view line) {
  return line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ';
}

void split_paragraph(const std::string& para, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 0; i < para.size(); ++i) {
    if (para[i] != '.') continue;
    bool boundary = false;
    if (i + 1 == para.size()) {
      boundary = true;
    } else if (para[i + 1] == ' ') {
      std::size_t k = i + 1;
      while (k < para.size() && para[k] == ' ') ++k;
      if (k == para.size()) {
        boundary = true;
      } else {
        auto n = static_cast<unsigned char>(para[k]);
        boundary = std::isupper(n) || is_bullet(std::string_view(para).substr(k));
      }
    }
    if (!boundary) continue;
    auto s = text::trim(std::string_view(para).substr(start, i + 1 - start));
    if (!s.empty()) out.emplace_back(s);
    start = i + 1;
  }
  auto rest = text::trim(std::string_view(para).substr(std::min(start, para.size())));
  if (!rest.empty()) out.emplace_back(rest);
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view long_desc) {
  std::vector<std::string> out;
  std::string para;
  auto flush = [&] {
    if (!para.empty()) split_paragraph(para, out);
    para.clear();
  };
  for (const auto& raw : text::split_lines(long_desc)) {
    auto line = text::trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (is_bullet(line)) {
      flush();
      line = text::trim(line.substr(2));
    }
    if (!para.empty()) para += ' ';
    para += line;
  }
  flush();
  return out;
}

std::vector<std::string> Triggers::default_patterns() {
  return {R"(\bonly\b)", "Only used when", "only supported by", "support only"};
}

Triggers::Triggers() : Triggers(default_patterns()) {}

Triggers::Triggers(std::vector<std::string> patterns) : patterns_(std::move(patterns)) {
  for (const auto& p : patterns_) {
    compiled_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
  }
}

const std::string* Triggers::match(std::string_view sentence) const {
  for (std::size_t i = 0; i < compiled_.size(); ++i) {
    if (std::regex_search(sentence.begin(), sentence.end(), compiled_[i])) return &patterns_[i];
  }
  return nullptr;
}

std::vector<CandidateSentence> flag_candidates(const ArgDoc& arg, const Triggers& triggers) {
  std::vector<CandidateSentence> out;
  for (auto& s : split_sentences(arg.long_desc)) {
    if (const auto* trig = triggers.match(s)) out.push_back({arg.name, std::move(s), *trig});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

std::string_view compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Assign: return "=";
    case CompareOp::Gt: return ">";
    case CompareOp::Lt: return "<";
    case CompareOp::Ge: return ">=";
    case CompareOp::Le: return "<=";
    case CompareOp::IsSetTo: return "is set to";
    case CompareOp::Is: return "is";
  }
  return "?";
}

std::string describe(const Cond& c) {
  auto vals = [&] {
    std::vector<std::string> vs;
    for (const auto& v : c.values) vs.push_back(render_python(v));
    return "[" + text::join(vs, ",") + "]";
  };
  switch (c.kind) {
    case Cond::Kind::Atom: {
      auto op = std::string(compare_op_text(c.op));
      if (std::isalpha(static_cast<unsigned char>(op[0]))) op = " " + op + " ";
      return c.name + op + vals();
    }
    case Cond::Kind::SeqAtom: return vals() + " " + c.name;
    case Cond::Kind::And: return "and(" + describe(c.children[0]) + "," + describe(c.children[1]) + ")";
    case Cond::Kind::Or: return "or(" + describe(c.children[0]) + "," + describe(c.children[1]) + ")";
  }
  return "?";
}

namespace {

template <class T>
struct Alt {
  T value;
  std::size_t end;
};

template <class T>
void add_alt(std::vector<Alt<T>>& alts, T value, std::size_t end) {
  for (const auto& a : alts) {
    if (a.end == end) return;
  }
  alts.push_back({std::move(value), end});
}

class ConstraintParser {
 public:
  explicit ConstraintParser(std::vector<Token> toks) : t_(std::move(toks)) {}

  std::variant<ConstraintAst, ConstraintParseFailure> run() {
    if (t_.empty()) return ConstraintParseFailure{"empty sentence"};
    if (auto a = only_when()) return ConstraintAst{std::move(*a)};
    if (auto a = supports_only()) return ConstraintAst{std::move(*a)};
    if (furthest_ < t_.size()) {
      return ConstraintParseFailure{"no constraint production matches (at '" + t_[furthest_].text + "')"};
    }
    return ConstraintParseFailure{"no constraint production matches (at end of sentence)"};
  }

 private:
  bool complete(std::size_t p) const { return p == t_.size() || (p + 1 == t_.size() && is_punct(p, ".")); }

  bool is_punct(std::size_t p, std::string_view s) const {
    return p < t_.size() && t_[p].kind == TokenKind::Punct && t_[p].text == s;
  }

  bool punct(std::size_t p, std::string_view s) {
    if (!is_punct(p, s)) return false;
    reach(p + 1);
    return true;
  }

  bool word(std::size_t p, std::string_view kw) {
    if (p < t_.size() && t_[p].kind == TokenKind::Word && text::iequals(t_[p].text, kw)) {
      reach(p + 1);
      return true;
    }
    return false;
  }

  void reach(std::size_t p) { furthest_ = std::max(furthest_, p); }

  static bool is_keyword(std::string_view w) {
    for (std::string_view k : {"and", "or", "the", "is", "only", "when", "if"}) {
      if (text::iequals(w, k)) return true;
    }
    return false;
  }

  std::optional<std::string> name(std::size_t p) {
    if (p < t_.size() && t_[p].kind == TokenKind::Word && text::is_identifier(t_[p].text) && !is_keyword(t_[p].text)) {
      reach(p + 1);
      return t_[p].text;
    }
    return std::nullopt;
  }

  std::optional<Literal> val(std::size_t p) {
    if (p >= t_.size() || t_[p].kind == TokenKind::Punct) return std::nullopt;
    if (t_[p].kind == TokenKind::Word && is_keyword(t_[p].text)) return std::nullopt;
    reach(p + 1);
    return token_literal(t_[p]);
  }

  /// seq ::= val (("," val)* ","? ("and" | "or") val)?
  std::vector<Alt<std::vector<Literal>>> seq(std::size_t p) {
    std::vector<Alt<std::vector<Literal>>> out;
    auto first = val(p);
    if (!first) return out;
    std::vector<Alt<std::vector<Literal>>> lists{{{*first}, p + 1}};
    while (punct(lists.back().end, ",")) {
      auto v = val(lists.back().end + 1);
      if (!v) break;
      auto next = lists.back().value;
      next.push_back(*v);
      lists.push_back({std::move(next), lists.back().end + 2});
    }
    for (auto it = lists.rbegin(); it != lists.rend(); ++it) {
      std::size_t r = it->end;
      if (punct(r, ",")) ++r;
      if (word(r, "and") || word(r, "or")) {
        if (auto v = val(r + 1)) {
          auto all = it->value;
          all.push_back(*v);
          add_alt(out, std::move(all), r + 2);
        }
      }
    }
    add_alt(out, lists.front().value, lists.front().end);
    return out;
  }

  std::vector<Alt<CompareOp>> compare(std::size_t p) {
    std::vector<Alt<CompareOp>> out;
    static const std::vector<std::pair<std::string_view, CompareOp>> kOps = {
        {"==", CompareOp::Eq}, {"=", CompareOp::Assign}, {">", CompareOp::Gt},
        {"<", CompareOp::Lt},  {">=", CompareOp::Ge},    {"<=", CompareOp::Le},
    };
    for (const auto& [s, op] : kOps) {
      if (punct(p, s)) out.push_back({op, p + 1});
    }
    if (word(p, "is") && word(p + 1, "set") && word(p + 2, "to")) out.push_back({CompareOp::IsSetTo, p + 3});
    if (word(p, "is")) out.push_back({CompareOp::Is, p + 1});
    return out;
  }

  /// atom ::= NAME compare seq | "the"? seq NAME ("is used")?
  std::vector<Alt<Cond>> atom(std::size_t p) {
    std::vector<Alt<Cond>> out;
    if (auto n = name(p)) {
      for (auto& op : compare(p + 1)) {
        for (auto& s : seq(op.end)) {
          Cond c;
          c.kind = Cond::Kind::Atom;
          c.name = *n;
          c.op = op.value;
          c.values = s.value;
          add_alt(out, std::move(c), s.end);
        }
      }
    }
    std::vector<std::size_t> starts{p};
    if (word(p, "the")) starts.push_back(p + 1);
    for (auto st : starts) {
      for (auto& s : seq(st)) {
        auto n = name(s.end);
        if (!n) continue;
        Cond c;
        c.kind = Cond::Kind::SeqAtom;
        c.name = *n;
        c.values = s.value;
        if (word(s.end + 1, "is") && word(s.end + 2, "used")) add_alt(out, c, s.end + 3);
        add_alt(out, std::move(c), s.end + 1);
      }
    }
    return out;
  }

  struct Chain {
    std::vector<Cond> atoms;
    std::vector<bool> is_and;  // operator between atoms[i] and atoms[i+1]
  };

  /// cond ::= atom | cond ("and" | "or") cond
  std::vector<Alt<Chain>> cond(std::size_t p) {
    std::vector<Alt<Chain>> result;
    std::vector<Alt<Chain>> frontier;
    for (auto& a : atom(p)) frontier.push_back({Chain{{a.value}, {}}, a.end});
    while (!frontier.empty()) {
      std::vector<Alt<Chain>> next;
      for (auto& f : frontier) {
        add_alt(result, f.value, f.end);
        bool is_and = word(f.end, "and");
        if (!is_and && !word(f.end, "or")) continue;
        for (auto& a : atom(f.end + 1)) {
          auto c = f.value;
          c.atoms.push_back(a.value);
          c.is_and.push_back(is_and);
          add_alt(next, std::move(c), a.end);
        }
      }
      frontier = std::move(next);
    }
    return result;
  }

  static Cond binary(Cond::Kind kind, Cond l, Cond r) {
    Cond c;
    c.kind = kind;
    c.children.push_back(std::move(l));
    c.children.push_back(std::move(r));
    return c;
  }

  /// And binds tighter than Or; both associate to the left.
  static Cond build(const Chain& ch) {
    std::vector<Cond> groups;
    Cond cur = ch.atoms[0];
    for (std::size_t i = 1; i < ch.atoms.size(); ++i) {
      if (ch.is_and[i - 1]) {
        cur = binary(Cond::Kind::And, std::move(cur), ch.atoms[i]);
      } else {
        groups.push_back(std::move(cur));
        cur = ch.atoms[i];
      }
    }
    groups.push_back(std::move(cur));
    Cond out = groups[0];
    for (std::size_t i = 1; i < groups.size(); ++i) out = binary(Cond::Kind::Or, std::move(out), groups[i]);
    return out;
  }

  /// start ::= only when cond
  std::optional<OnlyWhen> only_when() {
    if (!word(0, "only")) return std::nullopt;
    std::vector<std::pair<std::optional<std::string>, std::size_t>> heads{{std::nullopt, 1}};
    for (std::string_view v : {"used", "effective", "compatible", "significant", "available", "applies"}) {
      if (word(1, v)) heads.insert(heads.begin(), {t_[1].text, 2});
    }
    for (const auto& [verb, p] : heads) {
      for (std::string_view w : {"when", "if", "with", "in", "for"}) {
        if (!word(p, w)) continue;
        for (auto& c : cond(p + 1)) {
          if (!complete(c.end)) continue;
          return OnlyWhen{verb, text::to_lower(t_[p].text), build(c.value)};
        }
      }
    }
    return std::nullopt;
  }

  /// subject ("support" | "supports") "only" seq NAME?
  /// subject ::= "the"? seq NAME | "the"? NAME seq
  std::optional<SupportsOnly> supports_only() {
    std::vector<std::size_t> starts{0};
    if (word(0, "the")) starts.push_back(1);
    std::vector<Alt<std::pair<std::string, std::vector<Literal>>>> subjects;
    for (auto st : starts) {
      for (auto& s : seq(st)) {
        if (auto n = name(s.end)) subjects.push_back({{*n, s.value}, s.end + 1});
      }
      if (auto n = name(st)) {
        for (auto& s : seq(st + 1)) subjects.push_back({{*n, s.value}, s.end});
      }
    }
    for (auto& subj : subjects) {
      std::size_t p = subj.end;
      if (!(word(p, "support") || word(p, "supports")) || !word(p + 1, "only")) continue;
      for (auto& c : seq(p + 2)) {
        if (auto n = name(c.end); n && complete(c.end + 1)) {
          return SupportsOnly{subj.value.first, subj.value.second, c.value, *n};
        }
        if (complete(c.end)) return SupportsOnly{subj.value.first, subj.value.second, c.value, std::nullopt};
      }
    }
    return std::nullopt;
  }

  std::vector<Token> t_;
  std::size_t furthest_ = 0;
};

}  // namespace

std::variant<ConstraintAst, ConstraintParseFailure> parse_constraint(std::string_view sentence) {
  return ConstraintParser(tokenize(sentence)).run();
}

// ---------------------------------------------------------------------------
// Lowering

Json todo_placeholder(std::string_view sentence) {
  Json j = Json::object();
  j["description"] = "TODO: " + text::sanitize_utf8(sentence);
  return j;
}

std::string constraint_description(std::string_view sentence) {
  std::string out;
  for (char c : sentence) {
    if (c == '\'' || c == '"' || c == '`') continue;
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out += c;
  }
  return text::sanitize_utf8(text::trim(out));
}

namespace {

struct LowerError {
  std::string reason;
};

std::optional<std::string> resolve_name(std::string_view name, const ConstraintContext& ctx) {
  auto known = [&](const std::string& n) {
    return std::any_of(ctx.args.begin(), ctx.args.end(), [&](const auto& a) { return a.first == n; });
  };
  std::vector<std::string> forms{std::string(name)};
  std::string lower(name);
  if (!lower.empty()) lower[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lower[0])));
  forms.push_back(lower);
  for (const auto& f : std::vector<std::string>(forms)) {
    if (f.size() > 3 && f.compare(f.size() - 3, 3, "ies") == 0) forms.push_back(f.substr(0, f.size() - 3) + "y");
    if (f.size() > 1 && f.back() == 's') forms.push_back(f.substr(0, f.size() - 1));
  }
  for (const auto& f : forms) {
    if (known(f)) return f;
  }
  return std::nullopt;
}

Json values_json(const std::vector<Literal>& vals) {
  Json arr = Json::array();
  for (const auto& v : vals) {
    auto j = to_json(v);
    if (!j) throw LowerError{"value " + render_python(v) + " has no JSON form"};
    arr.push_back(*j);
  }
  return arr;
}

Json object_with(const std::string& name, Json prop) {
  Json j = Json::object();
  j["type"] = "object";
  j["properties"] = Json::object();
  j["properties"][name] = std::move(prop);
  return j;
}

bool plain_object(const Json& j) {
  return j.is_object() && j.size() == 2 && j.contains("type") && j.contains("properties");
}

Json lower_cond(const Cond& c, const ConstraintContext& ctx) {
  switch (c.kind) {
    case Cond::Kind::Atom:
    case Cond::Kind::SeqAtom: {
      auto n = resolve_name(c.name, ctx);
      if (!n) throw LowerError{"unknown-name: " + c.name};
      Json prop = Json::object();
      bool ordered = c.kind == Cond::Kind::Atom &&
                     (c.op == CompareOp::Gt || c.op == CompareOp::Ge || c.op == CompareOp::Lt || c.op == CompareOp::Le);
      if (!ordered) {
        prop["enum"] = values_json(c.values);
        return object_with(*n, std::move(prop));
      }
      if (c.values.size() != 1 || !c.values[0].is_number() || !to_json(c.values[0])) {
        throw LowerError{"UnloweredCompare: '" + std::string(compare_op_text(c.op)) + "' needs one number"};
      }
      Json bound = *to_json(c.values[0]);
      bool lower = c.op == CompareOp::Gt || c.op == CompareOp::Ge;
      bool strict = c.op == CompareOp::Gt || c.op == CompareOp::Lt;
      prop[lower ? "minimum" : "maximum"] = bound;
      if (strict) prop[lower ? "exclusiveMinimum" : "exclusiveMaximum"] = true;
      return object_with(*n, std::move(prop));
    }
    case Cond::Kind::And: {
      Json l = lower_cond(c.children[0], ctx);
      Json r = lower_cond(c.children[1], ctx);
      if (plain_object(l) && plain_object(r)) {
        bool disjoint = true;
        for (auto& [k, v] : r["properties"].items()) disjoint = disjoint && !l["properties"].contains(k);
        if (disjoint) {
          for (auto& [k, v] : r["properties"].items()) l["properties"][k] = v;
          return l;
        }
      }
      Json j = Json::object();
      j["allOf"] = Json::array({std::move(l), std::move(r)});
      return j;
    }
    case Cond::Kind::Or: {
      Json j = Json::object();
      j["anyOf"] = Json::array();
      for (const auto& ch : c.children) {
        Json m = lower_cond(ch, ctx);
        if (m.is_object() && m.size() == 1 && m.contains("anyOf")) {
          for (auto& x : m["anyOf"]) j["anyOf"].push_back(x);
        } else {
          j["anyOf"].push_back(std::move(m));
        }
      }
      return j;
    }
  }
  throw LowerError{"unknown condition"};
}

void collect_enum(const Json& schema, std::vector<Json>& out) {
  if (!schema.is_object()) return;
  if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
    for (const auto& v : *it) out.push_back(v);
  }
  if (auto it = schema.find("anyOf"); it != schema.end() && it->is_array()) {
    for (const auto& m : *it) collect_enum(m, out);
  }
}

std::string infer_conclusion(const SupportsOnly& s, const std::string& premise, const Json& concl,
                             const ConstraintContext& ctx) {
  std::vector<std::string> hits;
  for (const auto& [name, schema] : ctx.args) {
    if (name == premise) continue;
    std::vector<Json> members;
    collect_enum(schema, members);
    bool all = !members.empty();
    for (const auto& v : concl) all = all && std::find(members.begin(), members.end(), v) != members.end();
    if (all) hits.push_back(name);
  }
  if (hits.size() == 1) return hits.front();
  if (ctx.owner != premise && hits.empty()) return ctx.owner;
  if (hits.size() > 1) throw LowerError{"ambiguous conclusion argument for " + render_python(s.conclusion.front())};
  throw LowerError{"conclusion argument unknown"};
}

Json lower_form(const OnlyWhen& w, const ConstraintContext& ctx) {
  if (!ctx.owner_default) throw LowerError{"owner '" + ctx.owner + "' has no default"};
  auto d = to_json(*ctx.owner_default);
  if (!d) throw LowerError{"owner default " + render_python(*ctx.owner_default) + " has no JSON form"};
  Json premise = Json::object();
  premise["enum"] = Json::array({*d});
  Json anyof = Json::array();
  anyof.push_back(object_with(ctx.owner, std::move(premise)));
  anyof.push_back(lower_cond(w.cond, ctx));
  return anyof;
}

Json lower_form(const SupportsOnly& s, const ConstraintContext& ctx) {
  auto premise = resolve_name(s.premise_name, ctx);
  if (!premise) throw LowerError{"unknown-name: " + s.premise_name};
  Json concl_vals = values_json(s.conclusion);
  std::string concl;
  if (s.conclusion_name) {
    auto n = resolve_name(*s.conclusion_name, ctx);
    if (!n) throw LowerError{"unknown-name: " + *s.conclusion_name};
    concl = *n;
  } else {
    concl = infer_conclusion(s, *premise, concl_vals, ctx);
  }
  Json neg = Json::object();
  neg["not"] = Json::object();
  neg["not"]["enum"] = values_json(s.premise);
  Json pos = Json::object();
  pos["enum"] = std::move(concl_vals);
  Json anyof = Json::array();
  anyof.push_back(object_with(*premise, std::move(neg)));
  anyof.push_back(object_with(concl, std::move(pos)));
  return anyof;
}

}  // namespace

ConstraintResult lower_constraint(const CandidateSentence& c, const ConstraintAst& ast, const ConstraintContext& ctx) {
  ConstraintResult r;
  r.source = c;
  r.extension = ast.is_extension();
  try {
    Json anyof = std::visit([&](const auto& f) { return lower_form(f, ctx); }, ast.form);
    r.kind = ConstraintResult::Kind::Lowered;
    r.schema = Json::object();
    r.schema["description"] = constraint_description(c.text);
    r.schema["anyOf"] = std::move(anyof);
  } catch (const LowerError& e) {
    r.kind = ConstraintResult::Kind::Todo;
    r.reason = e.reason;
    r.schema = todo_placeholder(c.text);
  }
  return r;
}

ConstraintResult process_candidate(const CandidateSentence& c, const ConstraintContext& ctx) {
  auto parsed = parse_constraint(c.text);
  if (auto* ast = std::get_if<ConstraintAst>(&parsed)) return lower_constraint(c, *ast, ctx);
  ConstraintResult r;
  r.source = c;
  r.kind = ConstraintResult::Kind::Todo;
  r.reason = std::get<ConstraintParseFailure>(parsed).message;
  r.schema = todo_placeholder(c.text);
  return r;
}

}  // namespace hpmine
