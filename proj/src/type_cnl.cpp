#include "hpmine/type_cnl.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <map>

#include "hpmine/text.hpp"

namespace hpmine {

bool operator==(const AnyOfType& a, const AnyOfType& b) { return a.members == b.members; }

// ---------------------------------------------------------------------------
// Lexer

namespace {

bool is_punct_char(char c) {
  switch (c) {
    case '{': case '}': case '(': case ')': case '[': case ']':
    case ',': case ':': case '|': case ';':
      return true;
    default:
      return false;
  }
}

bool is_op_char(char c) { return c == '=' || c == '<' || c == '>' || c == '!'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_quote(char c) { return c == '\'' || c == '"'; }

bool is_alnum_u(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || u == '_' || u >= 0x80;
}

bool is_word_char(char c) {
  return !is_space(c) && !is_punct_char(c) && !is_op_char(c) && !is_quote(c) && c != '\\' && c != '`';
}

/// Length of a number lexeme at s[i], or 0.
std::size_t match_number(std::string_view s, std::size_t i) {
  std::size_t k = i;
  if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
  std::size_t digits = 0;
  while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
    ++k;
    ++digits;
  }
  if (k + 1 < s.size() && s[k] == '.' && std::isdigit(static_cast<unsigned char>(s[k + 1]))) {
    ++k;
    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
      ++k;
      ++digits;
    }
  }
  if (digits == 0) return 0;
  if (k < s.size() && (s[k] == 'e' || s[k] == 'E')) {
    std::size_t e = k + 1;
    if (e < s.size() && (s[e] == '+' || s[e] == '-')) ++e;
    std::size_t ed = e;
    while (ed < s.size() && std::isdigit(static_cast<unsigned char>(s[ed]))) ++ed;
    if (ed > e) k = ed;
  }
  // "2d" or "1st" are words.
  if (k < s.size() && is_alnum_u(s[k])) return 0;
  if (k + 1 < s.size() && s[k] == '.' && is_alnum_u(s[k + 1])) return 0;
  return k - i;
}

}  // namespace

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c) || c == '\\' || c == '`') {
      ++i;
      continue;
    }
    if (is_quote(c)) {
      std::size_t close = s.find(c, i + 1);
      if (close == std::string_view::npos) {
        ++i;  // stray quote
        continue;
      }
      out.push_back({TokenKind::Quoted, std::string(s.substr(i + 1, close - i - 1)), i, close + 1});
      i = close + 1;
      continue;
    }
    if (is_punct_char(c)) {
      out.push_back({TokenKind::Punct, std::string(1, c), i, i + 1});
      ++i;
      continue;
    }
    if (is_op_char(c)) {
      std::size_t k = i;
      while (k < s.size() && is_op_char(s[k])) ++k;
      out.push_back({TokenKind::Punct, std::string(s.substr(i, k - i)), i, k});
      i = k;
      continue;
    }
    bool sign_ok = out.empty() || out.back().end != i || out.back().kind == TokenKind::Punct;
    if (std::isdigit(static_cast<unsigned char>(c)) || ((c == '-' || c == '+') && sign_ok)) {
      if (std::size_t len = match_number(s, i)) {
        out.push_back({TokenKind::Number, std::string(s.substr(i, len)), i, i + len});
        i += len;
        continue;
      }
    }
    if (c == '.' && !(i + 1 < s.size() && is_alnum_u(s[i + 1]))) {
      out.push_back({TokenKind::Punct, ".", i, i + 1});
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k < s.size()) {
      char w = s[k];
      if (w == '.') {
        if (k + 1 < s.size() && is_alnum_u(s[k + 1])) {
          ++k;
          continue;
        }
        break;
      }
      // Apostrophes inside words ("it's") stay in the word.
      if (w == '\'' && k > i && is_alnum_u(s[k - 1]) && k + 1 < s.size() && std::isalpha(static_cast<unsigned char>(s[k + 1]))) {
        ++k;
        continue;
      }
      if (!is_word_char(w)) break;
      ++k;
    }
    if (k == i) k = i + 1;
    out.push_back({TokenKind::Word, std::string(s.substr(i, k - i)), i, k});
    i = k;
  }
  return out;
}

Literal token_literal(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::Quoted: return Literal::string(tok.text);
    case TokenKind::Number: {
      auto lit = decode_python_literal(tok.text);
      if (lit.is_number()) return lit;
      return Literal::string(tok.text);
    }
    default: {
      // docstrings write numpy's nan/inf bare
      if (tok.text == "nan" || tok.text == "NaN") return Literal::real(std::numeric_limits<double>::quiet_NaN(), "np.nan");
      if (tok.text == "inf") return Literal::real(std::numeric_limits<double>::infinity(), "np.inf");
      auto lit = decode_python_literal(tok.text);
      if (lit.kind == Literal::Kind::Other || lit.kind == Literal::Kind::String) return Literal::string(tok.text);
      return lit;
    }
  }
}

// ---------------------------------------------------------------------------
// Type expressions

TypeExpr make_union(std::vector<TypeExpr> members) {
  std::vector<TypeExpr> flat;
  std::function<void(TypeExpr&&)> push = [&](TypeExpr&& t) {
    if (auto* u = std::get_if<AnyOfType>(&t.node)) {
      for (auto& m : u->members) push(std::move(m));
      return;
    }
    flat.push_back(std::move(t));
  };
  for (auto& m : members) push(std::move(m));

  std::vector<TypeExpr> out;
  std::optional<std::size_t> enum_slot;
  for (auto& t : flat) {
    if (auto* e = std::get_if<EnumType>(&t.node)) {
      if (!enum_slot) {
        enum_slot = out.size();
        out.push_back(TypeExpr{EnumType{}});
      }
      auto& dst = std::get<EnumType>(out[*enum_slot].node).values;
      for (auto& v : e->values) {
        if (std::find(dst.begin(), dst.end(), v) == dst.end()) dst.push_back(v);
      }
      continue;
    }
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  if (out.size() == 1) return std::move(out.front());
  return TypeExpr{AnyOfType{std::move(out)}};
}

static std::string prim_name(PrimKind k) {
  switch (k) {
    case PrimKind::Integer: return "integer";
    case PrimKind::Number: return "number";
    case PrimKind::Boolean: return "boolean";
    case PrimKind::String: return "string";
    case PrimKind::None: return "none";
    case PrimKind::Callable: return "callable";
    case PrimKind::Dict: return "dict";
    case PrimKind::TypeObject: return "type";
    case PrimKind::Ignored: return "ignored";
  }
  return "?";
}

std::string describe(const TypeExpr& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, PrimType>) {
          return prim_name(n.kind);
        } else if constexpr (std::is_same_v<N, ObjType>) {
          return "obj";
        } else if constexpr (std::is_same_v<N, ArrayType>) {
          std::string s = "array(" + text::join(n.atype, "|") + ")";
          for (const auto& sh : n.shapes) s += sh.none ? "[None]" : "[" + text::join(sh.dims, ",") + "]";
          return s;
        } else if constexpr (std::is_same_v<N, EnumType>) {
          std::vector<std::string> vs;
          for (const auto& v : n.values) vs.push_back(render_python(v));
          return "enum[" + text::join(vs, ",") + "]";
        } else {
          std::vector<std::string> ms;
          for (const auto& m : n.members) ms.push_back(describe(m));
          return "anyOf[" + text::join(ms, ",") + "]";
        }
      },
      t.node);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

template <class T>
struct Alt {
  T value;
  std::size_t end;
};

template <class T>
using Alts = std::vector<Alt<T>>;

/// Adds an alternative unless one with the same end position exists; the
/// earlier derivation wins ties.
template <class T>
void add_alt(Alts<T>& alts, T value, std::size_t end) {
  for (const auto& a : alts) {
    if (a.end == end) return;
  }
  alts.push_back({std::move(value), end});
}

struct DefaultSpec {
  std::optional<Literal> value;
  bool alternative = false;  // the "or v (default)" form also names a type
};

class ShortDescParser {
 public:
  explicit ShortDescParser(const std::vector<Token>& toks) : t_(toks), memo_(toks.size() + 1) {}

  ShortDescResult run() {
    const std::size_t n = t_.size();
    if (n == 0) return failure("empty type description");
    for (auto& s : seq(0)) {
      for (auto& [opt, p2] : optional(s.end)) {
        for (auto& d : default_clause(p2)) {
          std::size_t p3 = d.end;
          bool complete = p3 == n || (p3 + 1 == n && (punct(p3, ".") || punct(p3, ",")));
          if (!complete) continue;
          ParsedShortDesc out;
          std::vector<TypeExpr> members = s.value;
          if (d.value.alternative && d.value.value) members.push_back(literal_type(*d.value.value));
          out.types = make_union(std::move(members));
          out.optional_flag = opt;
          out.default_value = d.value.value;
          return out;
        }
      }
    }
    return failure("no production of the type grammar matches");
  }

  std::optional<Literal> trailing_default() {
    const std::size_t n = t_.size();
    for (std::size_t p = 0; p < n; ++p) {
      for (auto& d : default_clause(p)) {
        if (!d.value.value || d.value.alternative) continue;
        if (d.end == n || (d.end + 1 == n && (punct(d.end, ".") || punct(d.end, ",")))) return d.value.value;
      }
    }
    return std::nullopt;
  }

 private:
  // -- terminals -----------------------------------------------------------

  bool word(std::size_t p, std::string_view kw) {
    if (p < t_.size() && t_[p].kind == TokenKind::Word && text::iequals(t_[p].text, kw)) {
      reach(p + 1);
      return true;
    }
    return false;
  }

  bool punct(std::size_t p, std::string_view s) {
    if (p < t_.size() && t_[p].kind == TokenKind::Punct && t_[p].text == s) {
      reach(p + 1);
      return true;
    }
    return false;
  }

  bool words(std::size_t p, std::initializer_list<std::string_view> kws) {
    for (auto kw : kws) {
      if (!word(p++, kw)) return false;
    }
    return true;
  }

  /// val ::= NAME | NUMBER, plus quoted strings (quotes are lexer noise).
  std::optional<Literal> val(std::size_t p) {
    if (p >= t_.size() || t_[p].kind == TokenKind::Punct) return std::nullopt;
    reach(p + 1);
    return token_literal(t_[p]);
  }

  void reach(std::size_t p) { furthest_ = std::max(furthest_, p); }

  ShortDescResult failure(std::string msg) const {
    ParseFailure f;
    f.prefix_tokens = furthest_;
    if (furthest_ < t_.size()) {
      f.fail_begin = t_[furthest_].begin;
      f.fail_end = t_[furthest_].end;
      msg += " (at '" + t_[furthest_].text + "')";
    } else if (!t_.empty()) {
      f.fail_begin = f.fail_end = t_.back().end;
      msg += " (at end of input)";
    }
    f.message = std::move(msg);
    return f;
  }

  static TypeExpr literal_type(const Literal& lit) {
    if (lit.kind == Literal::Kind::None) return TypeExpr{PrimType{PrimKind::None}};
    return TypeExpr{EnumType{{lit}}};
  }

  // -- start / seq -----------------------------------------------------------

  /// seq ::= (type ","?)+ ("or " type)?
  Alts<std::vector<TypeExpr>> seq(std::size_t pos) {
    Alts<std::vector<TypeExpr>> result;
    Alts<std::vector<TypeExpr>> frontier{{{}, pos}};
    while (!frontier.empty()) {
      Alts<std::vector<TypeExpr>> next;
      for (auto& f : frontier) {
        for (auto& ty : type(f.end)) {
          auto list = f.value;
          list.push_back(ty.value);
          add_alt(next, list, ty.end);
          add_alt(result, list, ty.end);
          if (punct(ty.end, ",")) {
            add_alt(next, list, ty.end + 1);
            add_alt(result, list, ty.end + 1);
          }
        }
      }
      frontier = std::move(next);
    }
    auto plain = result;
    for (auto& r : plain) {
      if (!word(r.end, "or")) continue;
      for (auto& ty : type(r.end + 1)) {
        auto list = r.value;
        list.push_back(ty.value);
        add_alt(result, std::move(list), ty.end);
      }
    }
    return result;
  }

  /// optional ::= (", optional")?
  Alts<bool> optional(std::size_t p) {
    Alts<bool> out{{false, p}};
    std::size_t q = punct(p, ",") ? p + 1 : p;
    if (word(q, "optional")) add_alt(out, true, q + 1);
    return out;
  }

  /// default ::= ","? ("default" ("="|":")? val | "(" "default" ("="|":")? val ")"
  ///             | val "by " "default" | "or " val "(" "default" ")")?
  Alts<DefaultSpec> default_clause(std::size_t p) {
    Alts<DefaultSpec> out{{DefaultSpec{}, p}};
    for (std::size_t q : {p, p + 1}) {
      if (q == p + 1 && !punct(p, ",")) break;
      if (word(q, "default")) {
        std::size_t r = q + 1;
        if (punct(r, "=") || punct(r, ":")) ++r;
        if (auto v = val(r)) add_alt(out, DefaultSpec{*v, false}, r + 1);
      }
      if (punct(q, "(") && word(q + 1, "default")) {
        std::size_t r = q + 2;
        if (punct(r, "=") || punct(r, ":")) ++r;
        if (auto v = val(r); v && punct(r + 1, ")")) add_alt(out, DefaultSpec{*v, false}, r + 2);
      }
      if (auto v = val(q); v && word(q + 1, "by") && word(q + 2, "default")) {
        add_alt(out, DefaultSpec{*v, false}, q + 3);
      }
      if (word(q, "or")) {
        if (auto v = val(q + 1); v && punct(q + 2, "(") && word(q + 3, "default") && punct(q + 4, ")")) {
          add_alt(out, DefaultSpec{*v, true}, q + 5);
        }
      }
    }
    return out;
  }

  // -- type ------------------------------------------------------------------

  const Alts<TypeExpr>& type(std::size_t p) {
    static const Alts<TypeExpr> kNone;
    if (p >= t_.size()) return kNone;
    if (memo_[p]) return *memo_[p];
    Alts<TypeExpr> out;
    {
      // ("string" | "str") ","? enum folds the prefix into the enumeration.
      if (word(p, "string") || word(p, "str")) {
        for (std::size_t q : {p + 1, p + 2}) {
          if (q == p + 2 && !punct(p + 1, ",")) break;
          for (auto& e : enum_type(q)) add_alt(out, TypeExpr{e.value}, e.end);
        }
      }
      static const std::vector<std::pair<std::string_view, PrimKind>> kPrims = {
          {"int", PrimKind::Integer},      {"integer", PrimKind::Integer}, {"float", PrimKind::Number},
          {"double", PrimKind::Number},    {"boolean", PrimKind::Boolean}, {"bool", PrimKind::Boolean},
          {"string", PrimKind::String},    {"str", PrimKind::String},      {"None", PrimKind::None},
          {"Ignored", PrimKind::Ignored},  {"callable", PrimKind::Callable}, {"dict", PrimKind::Dict},
          {"type", PrimKind::TypeObject},
      };
      for (const auto& [kw, kind] : kPrims) {
        if (word(p, kw)) {
          add_alt(out, TypeExpr{PrimType{kind}}, p + 1);
          break;
        }
      }
      for (auto& o : obj(p)) add_alt(out, TypeExpr{ObjType{}}, o);
      for (auto& a : array(p)) add_alt(out, TypeExpr{a.value}, a.end);
      for (auto& e : enum_type(p)) add_alt(out, TypeExpr{e.value}, e.end);
    }
    memo_[p] = std::move(out);
    return *memo_[p];
  }

  /// obj ::= "object" | "RandomState" "instance" | "returns an instance of self"
  /// Any word followed by "instance" is accepted as a class name.
  std::vector<std::size_t> obj(std::size_t p) {
    std::vector<std::size_t> ends;
    if (word(p, "object")) ends.push_back(p + 1);
    if (p < t_.size() && t_[p].kind == TokenKind::Word && word(p + 1, "instance")) ends.push_back(p + 2);
    if (words(p, {"returns", "an", "instance", "of", "self"})) ends.push_back(p + 5);
    return ends;
  }

  // -- array -----------------------------------------------------------------

  /// atype base spellings.
  std::optional<std::pair<std::string, std::size_t>> atype_base(std::size_t p) {
    if (words(p, {"numpy", "array"})) return std::make_pair(std::string("numpy array"), p + 2);
    if (words(p, {"sparse", "matrix"})) return std::make_pair(std::string("sparse matrix"), p + 2);
    if (words(p, {"scipy", "sparse"})) return std::make_pair(std::string("scipy.sparse"), p + 2);
    for (std::string_view kw : {"list", "array", "tuple", "array_like", "array-like", "scipy.sparse", "ndarray"}) {
      if (word(p, kw)) return std::make_pair(text::to_lower(kw), p + 1);
    }
    return std::nullopt;
  }

  /// atype ::= base | "{"? atype ("or " | ",") atype "}"?
  Alts<std::vector<std::string>> atype(std::size_t p) {
    Alts<std::vector<std::string>> out;
    bool brace = punct(p, "{");
    std::size_t start = brace ? p + 1 : p;
    auto first = atype_base(start);
    if (!first) {
      if (brace) {
        // "{" is optional, so the unbraced reading is still possible.
      }
      return out;
    }
    Alts<std::vector<std::string>> chain{{{first->first}, first->second}};
    std::size_t i = 0;
    while (i < chain.size()) {
      auto cur = chain[i++];
      if (word(cur.end, "or") || punct(cur.end, ",")) {
        if (auto b = atype_base(cur.end + 1)) {
          auto v = cur.value;
          v.push_back(b->first);
          chain.push_back({std::move(v), b->second});
        }
      }
    }
    for (auto& c : chain) {
      if (brace && punct(c.end, "}")) add_alt(out, c.value, c.end + 1);
      add_alt(out, c.value, c.end);
    }
    return out;
  }

  /// vtuple ::= ("(" | "[") val ("," val)* ","? ("]" | ")") | "None"
  std::optional<std::pair<Shape, std::size_t>> vtuple(std::size_t p, bool allow_none) {
    if (allow_none && word(p, "None")) return std::make_pair(Shape{{}, true}, p + 1);
    if (!(punct(p, "(") || punct(p, "["))) return std::nullopt;
    Shape s;
    std::size_t q = p + 1;
    auto v = val(q);
    if (!v) return std::nullopt;
    s.dims.push_back(t_[q].text);
    ++q;
    while (punct(q, ",")) {
      if (punct(q + 1, ")") || punct(q + 1, "]")) {
        ++q;
        break;
      }
      if (!val(q + 1)) return std::nullopt;
      s.dims.push_back(t_[q + 1].text);
      q += 2;
    }
    if (punct(q, "]") || punct(q, ")")) return std::make_pair(std::move(s), q + 1);
    return std::nullopt;
  }

  /// shape ::= ","? "of "? ("shape" | "size")? "="? vtuple ("or " shape)?
  Alts<std::vector<Shape>> shape(std::size_t p, bool allow_none) {
    Alts<std::vector<Shape>> out;
    std::vector<std::size_t> starts{p};
    auto extend = [&](std::vector<std::size_t> from, auto pred) {
      for (auto s : from) {
        if (auto e = pred(s)) starts.push_back(*e);
      }
    };
    extend(starts, [&](std::size_t s) -> std::optional<std::size_t> { return punct(s, ",") ? std::optional(s + 1) : std::nullopt; });
    extend(starts, [&](std::size_t s) -> std::optional<std::size_t> { return word(s, "of") ? std::optional(s + 1) : std::nullopt; });
    extend(starts, [&](std::size_t s) -> std::optional<std::size_t> {
      return (word(s, "shape") || word(s, "size")) ? std::optional(s + 1) : std::nullopt;
    });
    extend(starts, [&](std::size_t s) -> std::optional<std::size_t> { return punct(s, "=") ? std::optional(s + 1) : std::nullopt; });
    // Longest prefix first so that "of shape (...)" is preferred.
    std::sort(starts.begin(), starts.end(), std::greater<>());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    for (auto s : starts) {
      auto vt = vtuple(s, allow_none);
      if (!vt) continue;
      std::vector<Shape> shapes{vt->first};
      std::size_t end = vt->second;
      if (word(end, "or")) {
        // A bare "or None" after a shape reads as a union member instead.
        for (auto& more : shape(end + 1, false)) {
          auto all = shapes;
          all.insert(all.end(), more.value.begin(), more.value.end());
          add_alt(out, std::move(all), more.end);
        }
      }
      add_alt(out, shapes, end);
    }
    return out;
  }

  /// array ::= atype (shape)?
  Alts<ArrayType> array(std::size_t p) {
    Alts<ArrayType> out;
    for (auto& a : atype(p)) {
      for (auto& s : shape(a.end, true)) add_alt(out, ArrayType{a.value, s.value}, s.end);
      add_alt(out, ArrayType{a.value, {}}, a.end);
    }
    return out;
  }

  // -- enum ------------------------------------------------------------------

  Alts<EnumType> enum_type(std::size_t p) {
    Alts<EnumType> out;
    // "{" val (","? "or "? ("an " | "a ")? val)* "}"
    if (punct(p, "{")) {
      if (auto first = val(p + 1)) {
        std::vector<Literal> vals{*first};
        std::size_t q = p + 2;
        while (true) {
          std::size_t r = q;
          if (punct(r, ",")) ++r;
          if (word(r, "or")) ++r;
          if (word(r, "an") || word(r, "a")) {
            // Only an article when another value follows.
            if (r + 1 < t_.size() && t_[r + 1].kind != TokenKind::Punct) ++r;
          }
          if (r == q && !(q < t_.size() && t_[q].kind != TokenKind::Punct)) break;
          auto v = val(r);
          if (!v) break;
          vals.push_back(*v);
          q = r + 1;
        }
        if (punct(q, "}")) add_alt(out, EnumType{vals}, q + 1);
      }
    }
    // "["? val ("|" val)+ "]"?
    {
      bool bracket = punct(p, "[");
      std::size_t q = bracket ? p + 1 : p;
      if (auto first = val(q)) {
        std::vector<Literal> vals{*first};
        ++q;
        while (punct(q, "|")) {
          auto v = val(q + 1);
          if (!v) break;
          vals.push_back(*v);
          q += 2;
        }
        if (vals.size() >= 2) {
          if (bracket && punct(q, "]")) add_alt(out, EnumType{vals}, q + 1);
          add_alt(out, EnumType{vals}, q);
        }
      }
    }
    // Bare quoted values: 'a', 'b' or 'c'
    if (p < t_.size() && t_[p].kind == TokenKind::Quoted) {
      std::vector<Literal> vals{token_literal(t_[p])};
      reach(p + 1);
      std::size_t q = p + 1;
      Alts<EnumType> lists{{EnumType{vals}, q}};
      while (true) {
        std::size_t r = q;
        bool sep = false;
        if (punct(r, ",")) {
          ++r;
          sep = true;
        }
        if (word(r, "or")) {
          ++r;
          sep = true;
        }
        if (!sep || r >= t_.size() || t_[r].kind != TokenKind::Quoted) break;
        reach(r + 1);
        vals.push_back(token_literal(t_[r]));
        q = r + 1;
        lists.push_back({EnumType{vals}, q});
      }
      // Longest list first.
      for (auto it = lists.rbegin(); it != lists.rend(); ++it) add_alt(out, it->value, it->end);
    }
    return out;
  }

  const std::vector<Token>& t_;
  std::vector<std::optional<Alts<TypeExpr>>> memo_;
  std::size_t furthest_ = 0;
};

}  // namespace

ShortDescResult parse_short_desc(const std::vector<Token>& tokens) { return ShortDescParser(tokens).run(); }

std::optional<Literal> salvage_default(const std::vector<Token>& tokens) { return ShortDescParser(tokens).trailing_default(); }

// ---------------------------------------------------------------------------
// Lowering

Json lower_type_expr(const TypeExpr& t) {
  return std::visit(
      [](const auto& n) -> Json {
        using N = std::decay_t<decltype(n)>;
        Json j = Json::object();
        if constexpr (std::is_same_v<N, PrimType>) {
          switch (n.kind) {
            case PrimKind::Integer: j["type"] = "integer"; break;
            case PrimKind::Number: j["type"] = "number"; break;
            case PrimKind::Boolean: j["type"] = "boolean"; break;
            case PrimKind::String: j["type"] = "string"; break;
            case PrimKind::None:
            case PrimKind::Ignored: j["enum"] = Json::array({nullptr}); break;
            case PrimKind::Callable: j["laleType"] = "callable"; break;
            case PrimKind::Dict: j["type"] = "object"; break;
            case PrimKind::TypeObject: j["laleType"] = "type"; break;
          }
        } else if constexpr (std::is_same_v<N, ObjType>) {
          j["laleType"] = "Any";
        } else if constexpr (std::is_same_v<N, ArrayType>) {
          j["type"] = "array";
          Json meta = Json::object();
          meta["atype"] = n.atype;
          Json shapes = Json::array();
          for (const auto& s : n.shapes) {
            if (s.none) {
              shapes.push_back(nullptr);
            } else {
              Json dims = Json::array();
              for (const auto& d : s.dims) {
                auto lit = decode_python_literal(d);
                if (lit.is_integer()) {
                  dims.push_back(std::get<std::int64_t>(lit.value));
                } else {
                  dims.push_back(text::sanitize_utf8(d));
                }
              }
              shapes.push_back(std::move(dims));
            }
          }
          meta["shape"] = std::move(shapes);
          j["laleShape"] = std::move(meta);
        } else if constexpr (std::is_same_v<N, EnumType>) {
          Json vals = Json::array();
          for (const auto& v : n.values) {
            auto jv = to_json(v);
            Json item = jv ? *jv : Json(nullptr);
            if (std::find(vals.begin(), vals.end(), item) == vals.end()) vals.push_back(std::move(item));
          }
          j["enum"] = std::move(vals);
        } else {
          Json members = Json::array();
          for (const auto& m : n.members) members.push_back(lower_type_expr(m));
          j["anyOf"] = std::move(members);
        }
        return j;
      },
      t.node);
}

static bool contains_ignored(const TypeExpr& t) {
  if (auto* p = std::get_if<PrimType>(&t.node)) return p->kind == PrimKind::Ignored;
  if (auto* u = std::get_if<AnyOfType>(&t.node)) {
    return std::any_of(u->members.begin(), u->members.end(), contains_ignored);
  }
  return false;
}

LoweredType lower_type(const ParsedShortDesc& p, std::string_view long_desc) {
  LoweredType out;
  out.schema = Json::object();
  if (auto d = first_sentence(long_desc); !d.empty()) out.schema["description"] = d;
  Json body = lower_type_expr(p.types);
  for (auto& [k, v] : body.items()) out.schema[k] = v;
  if (contains_ignored(p.types)) out.notes.push_back("type 'Ignored' lowered to null");
  if (p.default_value) {
    if (auto j = to_json(*p.default_value)) {
      out.schema["default"] = *j;
    } else if (p.default_value->is_number()) {
      out.schema["default"] = nullptr;
      out.notes.push_back("default " + render_python(*p.default_value) + " is not representable in JSON; using null");
    }
  }
  return out;
}

std::string first_sentence(std::string_view long_desc) {
  std::string joined;
  for (const auto& line : text::split_lines(long_desc)) {
    auto t = text::trim(line);
    if (t.empty()) {
      if (joined.empty()) continue;
      break;
    }
    if (t.substr(0, 2) == "- " || t.substr(0, 2) == "* ") break;
    if (!joined.empty()) joined += ' ';
    joined += t;
  }
  std::size_t cut = std::string::npos;
  for (std::size_t i = 0; i < joined.size(); ++i) {
    char c = joined[i];
    bool at_end = i + 1 == joined.size();
    if (c == ';' && (at_end || joined[i + 1] == ' ')) {
      cut = i;
      break;
    }
    if (c == '.') {
      if (at_end) {
        cut = i;
        break;
      }
      if (joined[i + 1] == ' ' && i + 2 < joined.size()) {
        char n = joined[i + 2];
        if (std::isupper(static_cast<unsigned char>(n)) || n == '-' || n == '*' || n == '(' || is_quote(n) || n == '`') {
          cut = i;
          break;
        }
      }
    }
  }
  std::string s(text::trim(cut == std::string::npos ? std::string_view(joined) : std::string_view(joined).substr(0, cut)));
  while (!s.empty() && (s.back() == ':' || s.back() == ',' || s.back() == '.' || s.back() == ';')) s.pop_back();
  if (s.empty()) return s;
  return text::sanitize_utf8(s) + ".";
}

}  // namespace hpmine
