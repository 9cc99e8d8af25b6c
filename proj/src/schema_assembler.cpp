#include "hpmine/schema_assembler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hpmine/json_schema.hpp"
#include "hpmine/text.hpp"

namespace hpmine {

Json Diagnostic::to_json() const {
  Json j = Json::object();
  j["kind"] = kind;
  j["class"] = class_name;
  j["location"] = location;
  j["message"] = text::sanitize_utf8(message);
  return j;
}

Json ConstraintRecord::to_json() const {
  Json j = Json::object();
  j["argument"] = result.source.owner_arg;
  j["sentence"] = text::sanitize_utf8(result.source.text);
  j["trigger"] = result.source.trigger;
  if (result.kind == ConstraintResult::Kind::Lowered) {
    j["status"] = duplicate ? "duplicate" : "lowered";
    j["form"] = result.extension ? "supports-only" : "only-when";
  } else {
    j["status"] = "todo";
    j["reason"] = text::sanitize_utf8(result.reason);
  }
  return j;
}

Json OperatorSchemas::to_json() const {
  Json j = Json::object();
  j["class"] = class_name;
  j["hyperparams"] = hyperparams;
  j["input_fit"] = input_fit;
  j["input_predict_or_transform"] = input_predict_or_transform;
  j["output"] = output;
  return j;
}

OperatorSchemas OperatorSchemas::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("class") || !j["class"].is_string() || !j.contains("hyperparams") ||
      !j["hyperparams"].is_object()) {
    throw std::runtime_error("operator document needs string 'class' and object 'hyperparams'");
  }
  OperatorSchemas s;
  s.class_name = j["class"].get<std::string>();
  s.hyperparams = j["hyperparams"];
  s.input_fit = j.value("input_fit", Json::object());
  s.input_predict_or_transform = j.value("input_predict_or_transform", Json::object());
  s.output = j.value("output", Json::object());
  return s;
}

bool same_value(const Literal& a, const Literal& b) {
  if (a.is_number() && b.is_number()) {
    double x = a.as_double();
    double y = b.as_double();
    if (std::isnan(x) && std::isnan(y)) return true;
    return x == y;
  }
  return a == b;
}

std::string dump_document(const Json& j) {
  return j.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json canonical_order(const Json& schema) {
  if (!schema.is_object()) return schema;
  static const std::vector<std::string> kOrder = {
      "description", "enum",    "type",     "laleType",         "laleShape", "anyOf",
      "allOf",       "not",     "items",    "distribution",     "minimum",   "exclusiveMinimum",
      "maximum",     "exclusiveMaximum",    "default",          "minimumForOptimizer",
      "maximumForOptimizer",
  };
  auto nested = [](const std::string& key, const Json& v) -> Json {
    if ((key == "anyOf" || key == "allOf" || key == "oneOf") && v.is_array()) {
      Json out = Json::array();
      for (const auto& m : v) out.push_back(canonical_order(m));
      return out;
    }
    if (key == "not" || (key == "items" && v.is_object())) return canonical_order(v);
    return v;
  };
  Json out = Json::object();
  for (const auto& k : kOrder) {
    if (auto it = schema.find(k); it != schema.end()) out[k] = nested(k, *it);
  }
  for (auto it = schema.begin(); it != schema.end(); ++it) {
    if (!out.contains(it.key())) out[it.key()] = nested(it.key(), *it);
  }
  return out;
}

ArgResult analyze_arg(const ArgDoc& doc, const std::string& class_name, const std::string& method,
                      std::vector<Diagnostic>& diags) {
  ArgResult r;
  r.doc = doc;
  const std::string loc = method + "." + doc.name;
  auto toks = tokenize(doc.short_desc);
  auto res = parse_short_desc(toks);
  if (auto* p = std::get_if<ParsedShortDesc>(&res)) {
    r.parsed = *p;
    r.doc_default = p->default_value;
    auto lowered = lower_type(*p, doc.long_desc);
    r.fragment = std::move(lowered.schema);
    for (auto& note : lowered.notes) {
      bool ignored = note.find("Ignored") != std::string::npos;
      diags.push_back({ignored ? diag::kIgnoredType : diag::kNonRepresentable, class_name, loc, std::move(note)});
    }
  } else {
    auto& f = std::get<ParseFailure>(res);
    r.failure = f;
    r.doc_default = salvage_default(toks);
    diags.push_back({diag::kParseFailure, class_name, loc,
                     "cannot parse type \"" + doc.short_desc + "\": " + f.message});
  }
  return r;
}

namespace {

bool constrains(const Json& frag) {
  for (const char* k : {"type", "enum", "anyOf", "allOf", "laleType", "not"}) {
    if (frag.contains(k)) return true;
  }
  return false;
}

Json without_default(const Json& frag) {
  Json j = frag;
  j.erase("default");
  return j;
}

/// Signature default standing in for a documented choice, e.g. 'warn'.
bool is_sentinel(const Literal& sig, const Json& frag) {
  if (!sig.is_string() || !constrains(frag)) return false;
  return !validates(without_default(frag), Json(sig.as_string()));
}

void settle_default(Json& frag, const ArgResult* arg, const CtorParam* param, const std::string& class_name,
                    const std::string& loc, std::vector<Diagnostic>& diags) {
  const std::optional<Literal> doc = arg ? arg->doc_default : std::nullopt;
  const std::optional<Literal> sig = param ? param->default_value : std::nullopt;
  bool sig_literal = sig && sig->kind != Literal::Kind::Other;

  if (sig && sig->kind == Literal::Kind::Other) {
    diags.push_back({diag::kUnparseableDefault, class_name, loc, "signature default '" + sig->raw + "' is not a literal"});
  }
  if (doc) {
    if (sig_literal && !same_value(*doc, *sig)) {
      if (is_sentinel(*sig, frag)) {
        diags.push_back({diag::kSentinelDefault, class_name, loc,
                         "signature default " + render_python(*sig) + " stands in for documented default " +
                             render_python(*doc)});
      } else {
        diags.push_back({diag::kDocSignatureDefault, class_name, loc,
                         "docstring default " + render_python(*doc) + " but signature default " +
                             render_python(*sig)});
      }
    }
    return;  // the docstring default, if lowered, is already in the fragment
  }
  if (!sig_literal) return;
  if (is_sentinel(*sig, frag)) {
    diags.push_back({diag::kSentinelDefault, class_name, loc,
                     "signature default " + render_python(*sig) + " is not an admissible value"});
    return;
  }
  if (auto j = to_json(*sig)) {
    frag["default"] = *j;
  } else if (sig->is_number()) {
    frag["default"] = nullptr;
    diags.push_back({diag::kNonRepresentable, class_name, loc,
                     "default " + render_python(*sig) + " is not representable in JSON; using null"});
  }
}

void check_default(const Json& frag, const std::string& class_name, const std::string& loc,
                   std::vector<Diagnostic>& diags) {
  auto it = frag.find("default");
  if (it == frag.end() || !constrains(frag)) return;
  if (!validates(without_default(frag), *it)) {
    diags.push_back({diag::kDefaultMismatch, class_name, loc,
                     "default " + it->dump() + " does not validate against the documented type"});
  }
}

}  // namespace

Json assemble_hyperparams(const ClassDoc& cls, const std::vector<ArgResult>& args,
                          const std::vector<CandidateSentence>& candidates, std::vector<ConstraintRecord>& records,
                          std::vector<Diagnostic>& diags) {
  std::map<std::string, const ArgResult*> by_name;
  for (const auto& a : args) by_name.emplace(a.doc.name, &a);

  std::vector<std::string> order;
  if (cls.has_init) {
    for (const auto& p : cls.ctor_defaults) order.push_back(p.name);
    for (const auto& a : args) {
      if (!cls.param(a.doc.name)) {
        diags.push_back({diag::kNotInSignature, cls.class_name, "__init__." + a.doc.name,
                         "documented argument is not a constructor parameter"});
      }
    }
  } else {
    for (const auto& a : args) order.push_back(a.doc.name);
  }

  Json props = Json::object();
  std::vector<std::pair<std::string, Json>> ctx_args;
  for (const auto& name : order) {
    const std::string loc = "__init__." + name;
    auto it = by_name.find(name);
    const ArgResult* arg = it == by_name.end() ? nullptr : it->second;
    Json frag = arg ? arg->fragment : Json::object();
    if (!arg) diags.push_back({diag::kUndocumented, cls.class_name, loc, "constructor argument has no documentation"});
    settle_default(frag, arg, cls.param(name), cls.class_name, loc, diags);
    check_default(frag, cls.class_name, loc, diags);
    frag = canonical_order(frag);
    ctx_args.emplace_back(name, frag);
    props[name] = std::move(frag);
  }

  Json main = Json::object();
  main["type"] = "object";
  main["additionalProperties"] = false;
  Json names = Json::array();
  for (const auto& n : order) names.push_back(n);
  if (!names.empty()) main["required"] = names;
  main["relevantToOptimizer"] = names;
  main["properties"] = std::move(props);

  Json all = Json::array({std::move(main)});
  std::vector<Json> seen;
  for (const auto& c : candidates) {
    ConstraintContext ctx;
    ctx.owner = c.owner_arg;
    ctx.args = ctx_args;
    for (const auto& [n, frag] : ctx_args) {
      if (n == c.owner_arg && frag.contains("default")) ctx.owner_default = literal_from_json(frag["default"]);
    }
    ConstraintRecord rec{process_candidate(c, ctx), false};
    const std::string loc = "__init__." + c.owner_arg;
    if (rec.result.kind == ConstraintResult::Kind::Lowered) {
      const Json& body = rec.result.schema["anyOf"];
      if (std::find(seen.begin(), seen.end(), body) != seen.end()) {
        rec.duplicate = true;
        diags.push_back({diag::kConstraintDuplicate, cls.class_name, loc,
                         "\"" + c.text + "\" restates an earlier constraint"});
      } else {
        seen.push_back(body);
        all.push_back(rec.result.schema);
      }
    } else {
      diags.push_back({diag::kConstraintTodo, cls.class_name, loc, "\"" + c.text + "\": " + rec.result.reason});
      all.push_back(rec.result.schema);
    }
    records.push_back(std::move(rec));
  }

  Json doc = Json::object();
  doc["$schema"] = kDraft04Uri;
  doc["allOf"] = std::move(all);
  return doc;
}

namespace {

std::vector<Section> sections_of(const std::optional<std::string>& doc) {
  return split_sections(doc ? std::string_view(*doc) : std::string_view());
}

void report_entries(const ParameterList& pl, const std::string& class_name, const std::string& method,
                    std::vector<Diagnostic>& diags) {
  for (const auto& e : pl.errors) {
    diags.push_back({diag::kMalformedEntry, class_name, method, e.reason + ": " + e.text});
  }
}

}  // namespace

Json io_fragment(const std::vector<Section>& sections, const std::string& class_name, const std::string& method,
                 std::vector<Diagnostic>& diags) {
  const Section* sec = find_section(sections, SectionKind::Parameters);
  if (!sec) return Json::object();
  auto pl = parse_parameters(*sec);
  report_entries(pl, class_name, method, diags);
  Json props = Json::object();
  Json required = Json::array();
  for (const auto& a : pl.args) {
    auto r = analyze_arg(a, class_name, method, diags);
    // a type admitting None is as good as optional for fit/predict args
    bool optional = r.parsed && (r.parsed->optional_flag || r.parsed->default_value ||
                                 validates(r.fragment, Json(nullptr)));
    if (!optional) required.push_back(a.name);
    props[a.name] = canonical_order(r.fragment);
  }
  Json j = Json::object();
  j["type"] = "object";
  if (!required.empty()) j["required"] = std::move(required);
  j["properties"] = std::move(props);
  return j;
}

Json output_fragment(const std::vector<Section>& sections, const std::string& class_name, const std::string& method,
                     std::vector<Diagnostic>& diags) {
  const Section* sec = find_section(sections, SectionKind::Returns);
  if (!sec) return Json::object();
  auto pl = parse_parameters(*sec);
  std::vector<ArgDoc> entries = pl.args;
  // Unnamed returns ("array, shape (n_samples,)") have no colon.
  for (const auto& e : pl.errors) {
    if (e.reason.rfind("missing ':'", 0) == 0) {
      entries.push_back({"", std::string(text::trim(e.text)), ""});
    }
  }
  std::vector<Json> frags;
  for (const auto& e : entries) frags.push_back(canonical_order(analyze_arg(e, class_name, method + ".returns", diags).fragment));
  if (frags.empty()) return Json::object();
  if (frags.size() == 1) return frags.front();
  Json j = Json::object();
  j["type"] = "array";
  j["items"] = Json::array();
  for (auto& f : frags) j["items"].push_back(std::move(f));
  return j;
}

MinedOperator mine_class(const ClassDoc& cls, const Triggers& triggers) {
  MinedOperator m;
  m.schemas.class_name = cls.class_name;
  for (const auto& note : cls.notes) m.diagnostics.push_back({diag::kSignature, cls.class_name, "__init__", note});

  auto class_sections = sections_of(cls.class_docstring);
  const Section* params = find_section(class_sections, SectionKind::Parameters);
  std::vector<Section> init_sections;
  if (!params) {
    if (auto it = cls.method_docstrings.find("__init__"); it != cls.method_docstrings.end()) {
      init_sections = sections_of(it->second);
      params = find_section(init_sections, SectionKind::Parameters);
    }
  }
  std::vector<CandidateSentence> candidates;
  if (params) {
    auto pl = parse_parameters(*params);
    report_entries(pl, cls.class_name, "__init__", m.diagnostics);
    for (const auto& a : pl.args) {
      m.args.push_back(analyze_arg(a, cls.class_name, "__init__", m.diagnostics));
      auto flagged = flag_candidates(a, triggers);
      candidates.insert(candidates.end(), flagged.begin(), flagged.end());
    }
  }
  m.schemas.hyperparams = assemble_hyperparams(cls, m.args, candidates, m.constraints, m.diagnostics);

  auto method_sections = [&](const char* name) -> std::optional<std::vector<Section>> {
    auto it = cls.method_docstrings.find(name);
    if (it == cls.method_docstrings.end() || !it->second) return std::nullopt;
    return sections_of(it->second);
  };
  if (auto fit = method_sections("fit")) {
    m.schemas.input_fit = io_fragment(*fit, cls.class_name, "fit", m.diagnostics);
  } else {
    m.schemas.input_fit = Json::object();
  }
  std::string use = "predict";
  auto pt = method_sections("predict");
  if (!pt) {
    use = "transform";
    pt = method_sections("transform");
  }
  if (pt) {
    m.schemas.input_predict_or_transform = io_fragment(*pt, cls.class_name, use, m.diagnostics);
    m.schemas.output = output_fragment(*pt, cls.class_name, use, m.diagnostics);
  } else {
    m.schemas.input_predict_or_transform = Json::object();
    m.schemas.output = Json::object();
  }
  return m;
}

}  // namespace hpmine
