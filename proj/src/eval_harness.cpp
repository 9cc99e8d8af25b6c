#include "hpmine/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hpmine {

// ---------------------------------------------------------------------------
// Counts

double CategoryCounts::precision() const { return generated == 0 ? 0.0 : static_cast<double>(match) / generated; }
double CategoryCounts::recall() const { return reference == 0 ? 0.0 : static_cast<double>(match) / reference; }
double CategoryCounts::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

void CategoryCounts::add(const CategoryCounts& o) {
  reference += o.reference;
  generated += o.generated;
  match += o.match;
  if (o.detected) detected = detected.value_or(0) + *o.detected;
}

Json CategoryCounts::to_json() const {
  Json j = Json::object();
  j["reference"] = reference;
  j["generated"] = generated;
  if (detected) j["detected"] = *detected;
  j["match"] = match;
  j["precision"] = precision();
  j["recall"] = recall();
  j["f1"] = f1();
  return j;
}

const std::vector<std::string>& eval_categories() {
  static const std::vector<std::string> k = {"arguments", "types",        "defaults",   "ranges",
                                             "distributions", "constraints", "type_values", "enum_values"};
  return k;
}

void Attributed::add(const Attributed& o) {
  total += o.total;
  parser += o.parser;
  refiner += o.refiner;
}

void Coverage::add(const Coverage& o) {
  classes += o.classes;
  arguments += o.arguments;
  types.add(o.types);
  defaults.add(o.defaults);
  ranges.add(o.ranges);
  range_relevant += o.range_relevant;
  constraints_valid += o.constraints_valid;
  constraints_detected += o.constraints_detected;
}

namespace {

double ratio(long a, long b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; }

Json attributed_json(const Attributed& a, long denominator) {
  Json j = Json::object();
  j["total"] = a.total;
  j["coverage"] = ratio(a.total, denominator);
  j["parser"] = a.parser;
  j["refiner"] = a.refiner;
  return j;
}

}  // namespace

Json Coverage::to_json() const {
  Json j = Json::object();
  j["classes"] = classes;
  j["arguments"] = arguments;
  j["types"] = attributed_json(types, arguments);
  j["defaults"] = attributed_json(defaults, arguments);
  j["ranges"] = attributed_json(ranges, range_relevant);
  j["ranges"]["relevant"] = range_relevant;
  Json c = Json::object();
  c["valid"] = constraints_valid;
  c["detected"] = constraints_detected;
  c["coverage"] = ratio(constraints_valid, constraints_detected);
  j["constraints"] = std::move(c);
  return j;
}

// ---------------------------------------------------------------------------
// Normalization

namespace {

/// Sorted-key dump so that property order does not matter.
std::string key_of(const Json& j) { return nlohmann::json::parse(j.dump()).dump(); }

void sort_unique(Json& arr) {
  std::vector<std::pair<std::string, Json>> items;
  for (const auto& v : arr) items.emplace_back(key_of(v), v);
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  items.erase(std::unique(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
              items.end());
  arr = Json::array();
  for (auto& [k, v] : items) arr.push_back(std::move(v));
}

bool pure_enum(const Json& j) { return j.is_object() && j.size() == 1 && j.contains("enum") && j["enum"].is_array(); }

bool is_number_json(const Json& j) { return j.is_number(); }

}  // namespace

Json type_projection(const Json& schema) {
  if (!schema.is_object()) return schema;
  Json out = Json::object();
  if (auto it = schema.find("type"); it != schema.end()) {
    if (it->is_array()) {
      Json types = *it;
      sort_unique(types);
      out["type"] = types.size() == 1 ? types[0] : types;
    } else {
      out["type"] = *it;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end() && it->is_array()) {
    Json e = *it;
    sort_unique(e);
    out["enum"] = std::move(e);
  }
  if (auto it = schema.find("laleType"); it != schema.end()) out["laleType"] = *it;
  if (auto it = schema.find("not"); it != schema.end()) out["not"] = type_projection(*it);
  if (auto it = schema.find("allOf"); it != schema.end() && it->is_array()) {
    Json members = Json::array();
    for (const auto& m : *it) {
      Json p = type_projection(m);
      if (!p.empty()) members.push_back(std::move(p));
    }
    sort_unique(members);
    if (!members.empty()) out["allOf"] = std::move(members);
  }
  if (auto it = schema.find("anyOf"); it != schema.end() && it->is_array()) {
    Json flat = Json::array();
    Json merged_enum = Json::array();
    bool has_enum = false;
    std::vector<Json> stack(it->rbegin(), it->rend());
    while (!stack.empty()) {
      Json p = type_projection(stack.back());
      stack.pop_back();
      if (p.is_object() && p.size() == 1 && p.contains("anyOf")) {
        // revisit nested members so their enums merge too
        for (auto m = p["anyOf"].rbegin(); m != p["anyOf"].rend(); ++m) stack.push_back(*m);
        continue;
      }
      if (pure_enum(p)) {
        has_enum = true;
        for (const auto& v : p["enum"]) merged_enum.push_back(v);
        continue;
      }
      flat.push_back(std::move(p));
    }
    if (has_enum) {
      sort_unique(merged_enum);
      Json e = Json::object();
      e["enum"] = std::move(merged_enum);
      flat.push_back(std::move(e));
    }
    sort_unique(flat);
    if (flat.size() == 1 && out.empty()) return flat[0];
    out["anyOf"] = std::move(flat);
  }
  return out;
}

bool values_equal(const Json& a, const Json& b) {
  if (is_number_json(a) && is_number_json(b)) {
    if ((a.is_number_integer() || a.is_number_unsigned()) && (b.is_number_integer() || b.is_number_unsigned())) return a == b;
    double x = a.get<double>();
    double y = b.get<double>();
    if (x == y) return true;
    return std::fabs(x - y) <= 1e-9 * std::max(std::fabs(x), std::fabs(y));
  }
  if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!values_equal(a[i], b[i])) return false;
    }
    return true;
  }
  return a == b;
}

std::optional<Interval> range_of(const Json& schema) {
  if (!schema.is_object()) return std::nullopt;
  Interval iv;
  bool any = false;
  auto lower = [&](double v, bool excl) {
    if (!iv.lo || v > *iv.lo || (v == *iv.lo && excl)) {
      iv.lo = v;
      iv.lo_exclusive = excl;
    }
    any = true;
  };
  auto upper = [&](double v, bool excl) {
    if (!iv.hi || v < *iv.hi || (v == *iv.hi && excl)) {
      iv.hi = v;
      iv.hi_exclusive = excl;
    }
    any = true;
  };
  auto flag = [&](const char* k) { return schema.contains(k) && schema[k].is_boolean() && schema[k].get<bool>(); };
  if (schema.contains("minimum") && schema["minimum"].is_number()) lower(schema["minimum"].get<double>(), flag("exclusiveMinimum"));
  if (schema.contains("minimumForOptimizer") && schema["minimumForOptimizer"].is_number()) {
    lower(schema["minimumForOptimizer"].get<double>(), false);
  }
  if (schema.contains("maximum") && schema["maximum"].is_number()) upper(schema["maximum"].get<double>(), flag("exclusiveMaximum"));
  if (schema.contains("maximumForOptimizer") && schema["maximumForOptimizer"].is_number()) {
    upper(schema["maximumForOptimizer"].get<double>(), false);
  }
  if (any) return iv;
  if (auto it = schema.find("anyOf"); it != schema.end() && it->is_array()) {
    for (const auto& m : *it) {
      if (auto r = range_of(m)) return r;
    }
  }
  return std::nullopt;
}

bool interval_within(const Interval& inner, const Interval& outer) {
  if (outer.lo) {
    if (!inner.lo) return false;
    if (*inner.lo < *outer.lo) return false;
    if (*inner.lo == *outer.lo && outer.lo_exclusive && !inner.lo_exclusive) return false;
  }
  if (outer.hi) {
    if (!inner.hi) return false;
    if (*inner.hi > *outer.hi) return false;
    if (*inner.hi == *outer.hi && outer.hi_exclusive && !inner.hi_exclusive) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

const Json& main_properties(const Json& hp) {
  static const Json kEmpty = Json::object();
  if (!hp.is_object()) return kEmpty;
  auto all = hp.find("allOf");
  if (all == hp.end() || !all->is_array() || all->empty()) return kEmpty;
  auto props = (*all)[0].find("properties");
  if (props == (*all)[0].end() || !props->is_object()) return kEmpty;
  return *props;
}

struct Constraints {
  std::vector<std::string> lowered;  // normalized keys
  long todo = 0;
};

Constraints constraints_of(const Json& hp) {
  Constraints c;
  if (!hp.is_object() || !hp.contains("allOf") || !hp["allOf"].is_array()) return c;
  const Json& all = hp["allOf"];
  for (std::size_t i = 1; i < all.size(); ++i) {
    const Json& e = all[i];
    if (!e.is_object()) continue;
    if (e.contains("anyOf") && e["anyOf"].is_array()) {
      Json branches = e["anyOf"];
      sort_unique(branches);
      c.lowered.push_back(key_of(branches));
    } else if (e.contains("description") && e["description"].is_string() &&
               e["description"].get<std::string>().rfind("TODO", 0) == 0) {
      ++c.todo;
    }
  }
  return c;
}

void terminals(const Json& proj, const std::string& arg, std::vector<std::string>& out) {
  if (!proj.is_object()) return;
  if (auto it = proj.find("type"); it != proj.end()) {
    std::vector<Json> types = it->is_array() ? it->get<std::vector<Json>>() : std::vector<Json>{*it};
    for (const auto& t : types) {
      if (t == "boolean" || t == "integer" || t == "number" || t == "string") out.push_back(arg + "\x1f" + t.get<std::string>());
    }
  }
  if (proj.contains("enum")) out.push_back(arg + "\x1f" "enum");
  for (const char* k : {"anyOf", "allOf"}) {
    if (auto it = proj.find(k); it != proj.end() && it->is_array()) {
      for (const auto& m : *it) terminals(m, arg, out);
    }
  }
}

void enum_members(const Json& proj, const std::string& arg, std::vector<std::string>& out) {
  if (!proj.is_object()) return;
  if (auto it = proj.find("enum"); it != proj.end() && it->is_array()) {
    for (const auto& v : *it) out.push_back(arg + "\x1f" + key_of(v));
  }
  for (const char* k : {"anyOf", "allOf"}) {
    if (auto it = proj.find(k); it != proj.end() && it->is_array()) {
      for (const auto& m : *it) enum_members(m, arg, out);
    }
  }
}

long multiset_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::string> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<long>(common.size());
}

}  // namespace

EvalRow compare(const OperatorSchemas& generated, const OperatorSchemas& curated) {
  EvalRow row;
  row.class_name = curated.class_name;
  const Json& g = main_properties(generated.hyperparams);
  const Json& c = main_properties(curated.hyperparams);
  auto& cats = row.categories;
  for (const auto& k : eval_categories()) cats[k] = CategoryCounts{};

  std::vector<std::string> tv_g, tv_c, ev_g, ev_c;
  auto scan = [&](const Json& props, bool is_gen) {
    for (auto it = props.begin(); it != props.end(); ++it) {
      const Json& s = *it;
      auto count = [&](const char* cat) { (is_gen ? cats[cat].generated : cats[cat].reference)++; };
      count("arguments");
      Json proj = type_projection(s);
      if (proj.is_object() && !proj.empty()) count("types");
      if (s.is_object() && s.contains("default")) count("defaults");
      if (range_of(s)) count("ranges");
      if (s.is_object() && s.contains("distribution") && s["distribution"].is_string()) count("distributions");
      terminals(proj, it.key(), is_gen ? tv_g : tv_c);
      enum_members(proj, it.key(), is_gen ? ev_g : ev_c);
    }
  };
  scan(g, true);
  scan(c, false);

  for (auto it = c.begin(); it != c.end(); ++it) {
    auto gi = g.find(it.key());
    if (gi == g.end()) continue;
    const Json& cs = *it;
    const Json& gs = *gi;
    cats["arguments"].match++;
    Json pc = type_projection(cs);
    Json pg = type_projection(gs);
    if (pc.is_object() && !pc.empty() && key_of(pc) == key_of(pg)) cats["types"].match++;
    if (cs.is_object() && gs.is_object() && cs.contains("default") && gs.contains("default") &&
        values_equal(cs["default"], gs["default"])) {
      cats["defaults"].match++;
    }
    auto rc = range_of(cs);
    auto rg = range_of(gs);
    if (rc && rg && interval_within(*rg, *rc)) cats["ranges"].match++;
    if (cs.is_object() && gs.is_object() && cs.contains("distribution") && gs.contains("distribution") &&
        cs["distribution"] == gs["distribution"]) {
      cats["distributions"].match++;
    }
  }

  auto cg = constraints_of(generated.hyperparams);
  auto cc = constraints_of(curated.hyperparams);
  cats["constraints"].reference = static_cast<long>(cc.lowered.size());
  cats["constraints"].generated = static_cast<long>(cg.lowered.size());
  cats["constraints"].detected = static_cast<long>(cg.lowered.size()) + cg.todo;
  cats["constraints"].match = multiset_overlap(cg.lowered, cc.lowered);

  cats["type_values"].reference = static_cast<long>(tv_c.size());
  cats["type_values"].generated = static_cast<long>(tv_g.size());
  cats["type_values"].match = multiset_overlap(tv_g, tv_c);
  cats["enum_values"].reference = static_cast<long>(ev_c.size());
  cats["enum_values"].generated = static_cast<long>(ev_g.size());
  cats["enum_values"].match = multiset_overlap(ev_g, ev_c);
  return row;
}

EvalReport aggregate(std::vector<EvalRow> rows) {
  EvalReport r;
  for (const auto& k : eval_categories()) r.totals[k] = CategoryCounts{};
  r.totals["constraints"].detected = 0;
  for (const auto& row : rows) {
    for (const auto& [k, v] : row.categories) r.totals[k].add(v);
  }
  r.rows = std::move(rows);
  return r;
}

Coverage coverage_of(const OperatorSchemas& generated, const OperatorSchemas* raw) {
  Coverage cov;
  cov.classes = 1;
  auto count_args = [&](const Json& frag, const Json* raw_frag) {
    if (!frag.is_object() || !frag.contains("properties") || !frag["properties"].is_object()) return;
    const Json& props = frag["properties"];
    for (auto it = props.begin(); it != props.end(); ++it) {
      cov.arguments++;
      const Json* before = nullptr;
      if (raw_frag && raw_frag->is_object() && raw_frag->contains("properties") && (*raw_frag)["properties"].contains(it.key())) {
        before = &(*raw_frag)["properties"][it.key()];
      }
      auto attribute = [&](Attributed& a, bool now, bool then) {
        if (!now) return;
        a.total++;
        (then ? a.parser : a.refiner)++;
      };
      Json proj = type_projection(*it);
      bool has_type = proj.is_object() && !proj.empty();
      bool had_type = !raw || (before && key_of(type_projection(*before)) == key_of(proj));
      attribute(cov.types, has_type, had_type);
      bool has_default = it->is_object() && it->contains("default");
      bool had_default = !raw || (before && before->contains("default") && values_equal((*before)["default"], (*it)["default"]));
      attribute(cov.defaults, has_default, had_default);
    }
  };
  const Json* raw_hp = nullptr;
  if (raw && raw->hyperparams.contains("allOf") && raw->hyperparams["allOf"].is_array() && !raw->hyperparams["allOf"].empty()) {
    raw_hp = &raw->hyperparams["allOf"][0];
  }
  if (generated.hyperparams.contains("allOf") && generated.hyperparams["allOf"].is_array() &&
      !generated.hyperparams["allOf"].empty()) {
    count_args(generated.hyperparams["allOf"][0], raw_hp);
  }
  count_args(generated.input_fit, raw ? &raw->input_fit : nullptr);
  count_args(generated.input_predict_or_transform, raw ? &raw->input_predict_or_transform : nullptr);

  const Json& props = main_properties(generated.hyperparams);
  const Json& raw_props = raw ? main_properties(raw->hyperparams) : props;
  for (auto it = props.begin(); it != props.end(); ++it) {
    std::vector<std::string> t;
    terminals(type_projection(*it), it.key(), t);
    bool relevant = std::any_of(t.begin(), t.end(), [](const std::string& s) {
      auto k = s.substr(s.find('\x1f') + 1);
      return k == "integer" || k == "number" || k == "string" || k == "enum";
    });
    if (relevant) cov.range_relevant++;
    if (!range_of(*it)) continue;
    cov.ranges.total++;
    bool before = raw_props.contains(it.key()) && range_of(raw_props[it.key()]).has_value();
    (before ? cov.ranges.parser : cov.ranges.refiner)++;
  }
  auto cons = constraints_of(generated.hyperparams);
  cov.constraints_valid = static_cast<long>(cons.lowered.size());
  cov.constraints_detected = cov.constraints_valid + cons.todo;
  return cov;
}

// ---------------------------------------------------------------------------
// Reports

Json EvalReport::to_json() const {
  Json j = Json::object();
  Json t = Json::object();
  for (const auto& k : eval_categories()) t[k] = totals.at(k).to_json();
  j["totals"] = std::move(t);
  Json classes = Json::array();
  for (const auto& row : rows) {
    Json r = Json::object();
    r["class"] = row.class_name;
    for (const auto& k : eval_categories()) r[k] = row.categories.at(k).to_json();
    classes.push_back(std::move(r));
  }
  j["classes"] = std::move(classes);
  if (has_coverage) j["coverage"] = coverage.to_json();
  j["unpaired_generated"] = unpaired_generated;
  j["unpaired_curated"] = unpaired_curated;
  return j;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %10s %12s %8s %10s %8s %6s\n", "", "reference", "generated", "match",
                "precision", "recall", "F1");
  out << buf;
  for (const auto& k : eval_categories()) {
    const auto& c = totals.at(k);
    std::string gen = std::to_string(c.generated);
    if (c.detected) gen += " (/" + std::to_string(*c.detected) + ")";
    std::snprintf(buf, sizeof buf, "%-14s %10ld %12s %8ld %10.2f %8.2f %6.2f\n", k.c_str(), c.reference, gen.c_str(),
                  c.match, c.precision(), c.recall(), c.f1());
    out << buf;
  }
  if (has_coverage) {
    out << "\n";
    std::snprintf(buf, sizeof buf, "%-14s %8s %9s\n", "", "total", "coverage");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-14s %8ld %9.2f\n", "classes", coverage.classes, coverage.classes ? 1.0 : 0.0);
    out << buf;
    std::snprintf(buf, sizeof buf, "%-14s %8ld %9.2f\n", "arguments", coverage.arguments, coverage.arguments ? 1.0 : 0.0);
    out << buf;
    auto line = [&](const char* name, const Attributed& a, long denom) {
      std::snprintf(buf, sizeof buf, "%-14s %8ld %9.2f  (%ld + %ld)\n", name, a.total, ratio(a.total, denom), a.parser,
                    a.refiner);
      out << buf;
    };
    line("types", coverage.types, coverage.arguments);
    line("default", coverage.defaults, coverage.arguments);
    line("range", coverage.ranges, coverage.range_relevant);
    std::snprintf(buf, sizeof buf, "%-14s %8ld %9.2f  /%ld\n", "constraints", coverage.constraints_valid,
                  ratio(coverage.constraints_valid, coverage.constraints_detected), coverage.constraints_detected);
    out << buf;
  }
  if (!unpaired_generated.empty() || !unpaired_curated.empty()) {
    out << "\n";
    for (const auto& n : unpaired_generated) out << "unpaired generated: " << n << "\n";
    for (const auto& n : unpaired_curated) out << "unpaired curated: " << n << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Files

OperatorSchemas load_operator_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaLoadError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw SchemaLoadError(path.string() + ": " + e.what());
  }
  try {
    if (j.is_object() && j.contains("hyperparams")) return OperatorSchemas::from_json(j);
  } catch (const std::runtime_error& e) {
    throw SchemaLoadError(path.string() + ": " + e.what());
  }
  if (j.is_object() && (j.contains("allOf") || j.contains("$schema"))) {
    OperatorSchemas s;
    s.class_name = path.stem().string();
    s.hyperparams = j;
    s.input_fit = Json::object();
    s.input_predict_or_transform = Json::object();
    s.output = Json::object();
    return s;
  }
  throw SchemaLoadError(path.string() + ": not an operator schema document");
}

std::map<std::string, OperatorSchemas> load_operator_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw SchemaLoadError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    auto name = e.path().filename().string();
    if (name == "diagnostics.json" || name == "report.json") continue;
    if (name.size() > 10 && name.compare(name.size() - 10, 10, ".plan.json") == 0) continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, OperatorSchemas> out;
  for (const auto& f : files) {
    auto doc = load_operator_document(f);
    auto name = doc.class_name;
    if (!out.emplace(name, std::move(doc)).second) {
      throw SchemaLoadError("class " + name + " appears twice under " + dir.string());
    }
  }
  return out;
}

EvalReport evaluate_dirs(const std::filesystem::path& generated, const std::filesystem::path& curated,
                         const std::optional<std::filesystem::path>& raw) {
  auto cur = load_operator_dir(curated);
  if (cur.empty()) throw SchemaLoadError("no curated schemas under " + curated.string());
  auto gen = load_operator_dir(generated);
  std::map<std::string, OperatorSchemas> before;
  if (raw) before = load_operator_dir(*raw);

  std::vector<EvalRow> rows;
  std::vector<std::string> unpaired_gen;
  std::vector<std::string> unpaired_cur;
  for (const auto& [name, c] : cur) {
    auto g = gen.find(name);
    if (g == gen.end()) {
      unpaired_cur.push_back(name);
      continue;
    }
    rows.push_back(compare(g->second, c));
  }
  for (const auto& [name, g] : gen) {
    if (!cur.count(name)) unpaired_gen.push_back(name);
  }
  EvalReport report = aggregate(std::move(rows));
  report.unpaired_generated = std::move(unpaired_gen);
  report.unpaired_curated = std::move(unpaired_cur);
  report.has_coverage = true;
  for (const auto& [name, g] : gen) {
    auto b = before.find(name);
    report.coverage.add(coverage_of(g, raw && b != before.end() ? &b->second : nullptr));
  }
  return report;
}

}  // namespace hpmine
