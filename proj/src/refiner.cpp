#include "hpmine/refiner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hpmine/embedded_schemas.hpp"
#include "hpmine/json_schema.hpp"

namespace hpmine {

// ---------------------------------------------------------------------------
// Observation files

const Json& observation_schema() {
  static const Json schema = Json::parse(embedded::kObservationSetSchema);
  return schema;
}

namespace {

Json value_to_json(const Literal& lit) {
  if (auto j = to_json(lit)) return *j;
  if (lit.is_number()) {
    double d = lit.as_double();
    Json j = Json::object();
    j["__float__"] = std::isnan(d) ? "nan" : (d > 0 ? "inf" : "-inf");
    return j;
  }
  return Json(lit.raw);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accepted: return "accepted";
    case Verdict::Rejected: return "rejected";
    case Verdict::Timeout: return "timeout";
  }
  return "?";
}

}  // namespace

ObservationSet ObservationSet::from_json(const Json& j) {
  auto errors = SchemaValidator(observation_schema()).validate(j);
  if (!errors.empty()) {
    const auto& e = errors.front();
    throw std::runtime_error("invalid observation file at '" + e.instance_path + "': " + e.message);
  }
  ObservationSet o;
  o.class_name = j["class_name"].get<std::string>();
  o.class_path = j.value("class_path", std::string());
  if (auto it = j.find("observed_defaults"); it != j.end()) {
    for (auto d = it->begin(); d != it->end(); ++d) o.observed_defaults.emplace(d.key(), literal_from_json(*d));
  }
  if (auto it = j.find("harvested_enums"); it != j.end()) {
    for (auto h = it->begin(); h != it->end(); ++h) {
      auto& list = o.harvested_enums[h.key()];
      for (const auto& item : *h) {
        HarvestedValue v;
        v.value = item["value"];
        auto verdict = item["verdict"].get<std::string>();
        v.verdict = verdict == "accepted" ? Verdict::Accepted : verdict == "rejected" ? Verdict::Rejected : Verdict::Timeout;
        v.message = item.value("message", std::string());
        list.push_back(std::move(v));
      }
    }
  }
  if (auto it = j.find("numeric_bounds"); it != j.end()) {
    for (auto b = it->begin(); b != it->end(); ++b) {
      NumericBound nb;
      if (b->contains("min")) nb.min = (*b)["min"];
      if (b->contains("min_exclusive")) nb.min_exclusive = (*b)["min_exclusive"].get<bool>();
      if (b->contains("max")) nb.max = (*b)["max"];
      if (b->contains("max_exclusive")) nb.max_exclusive = (*b)["max_exclusive"].get<bool>();
      o.numeric_bounds.emplace(b.key(), nb);
    }
  }
  if (auto it = j.find("exception_notes"); it != j.end()) {
    for (auto n = it->begin(); n != it->end(); ++n) o.exception_notes[n.key()] = n->get<std::vector<std::string>>();
  }
  if (auto it = j.find("notes"); it != j.end()) o.notes = it->get<std::vector<std::string>>();
  return o;
}

Json ObservationSet::to_json() const {
  Json j = Json::object();
  j["class_name"] = class_name;
  if (!class_path.empty()) j["class_path"] = class_path;
  Json d = Json::object();
  for (const auto& [k, v] : observed_defaults) d[k] = value_to_json(v);
  j["observed_defaults"] = std::move(d);
  Json h = Json::object();
  for (const auto& [k, list] : harvested_enums) {
    Json arr = Json::array();
    for (const auto& v : list) {
      Json item = Json::object();
      item["value"] = v.value;
      item["verdict"] = verdict_name(v.verdict);
      if (!v.message.empty()) item["message"] = v.message;
      arr.push_back(std::move(item));
    }
    h[k] = std::move(arr);
  }
  j["harvested_enums"] = std::move(h);
  Json b = Json::object();
  for (const auto& [k, nb] : numeric_bounds) {
    Json x = Json::object();
    if (nb.min) x["min"] = *nb.min;
    if (nb.min_exclusive) x["min_exclusive"] = *nb.min_exclusive;
    if (nb.max) x["max"] = *nb.max;
    if (nb.max_exclusive) x["max_exclusive"] = *nb.max_exclusive;
    b[k] = std::move(x);
  }
  j["numeric_bounds"] = std::move(b);
  Json n = Json::object();
  for (const auto& [k, v] : exception_notes) n[k] = v;
  j["exception_notes"] = std::move(n);
  if (!notes.empty()) j["notes"] = notes;
  return j;
}

// ---------------------------------------------------------------------------
// Overrides

Overrides Overrides::from_json(const Json& j) {
  if (!j.is_object()) throw std::runtime_error("overrides must be a JSON object keyed \"Class.arg\"");
  Overrides out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() || key.find('.', dot + 1) != std::string::npos) {
      throw std::runtime_error("override key '" + key + "' is not of the form Class.arg");
    }
    if (!it->is_object()) throw std::runtime_error("override '" + key + "' must be an object");
    ArgOverride ov;
    for (auto f = it->begin(); f != it->end(); ++f) {
      const std::string& k = f.key();
      auto bad = [&](const char* what) { return std::runtime_error("override '" + key + "." + k + "' must be " + what); };
      if (k == "schema") {
        if (!f->is_object()) throw bad("an object");
        ov.schema = *f;
      } else if (k == "exclude_from_optimizer") {
        if (!f->is_boolean()) throw bad("a boolean");
        ov.exclude_from_optimizer = f->get<bool>();
      } else if (k == "distribution") {
        if (!f->is_string()) throw bad("a string");
        ov.distribution = f->get<std::string>();
      } else if (k == "minimumForOptimizer") {
        if (!f->is_number()) throw bad("a number");
        ov.minimum_for_optimizer = *f;
      } else if (k == "maximumForOptimizer") {
        if (!f->is_number()) throw bad("a number");
        ov.maximum_for_optimizer = *f;
      } else if (k == "blacklist") {
        if (!f->is_array()) throw bad("an array");
        ov.blacklist = f->get<std::vector<Json>>();
      } else {
        throw std::runtime_error("unknown override field '" + k + "' in '" + key + "'");
      }
    }
    out.entries_.push_back({{key.substr(0, dot), key.substr(dot + 1)}, std::move(ov)});
  }
  return out;
}

const ArgOverride* Overrides::find(const std::string& class_name, const std::string& arg) const {
  for (const auto& [k, v] : entries_) {
    if (k.first == class_name && k.second == arg) return &v;
  }
  return nullptr;
}

std::vector<std::pair<std::string, const ArgOverride*>> Overrides::for_class(const std::string& class_name) const {
  std::vector<std::pair<std::string, const ArgOverride*>> out;
  for (const auto& [k, v] : entries_) {
    if (k.first == class_name) out.emplace_back(k.second, &v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Refinement

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

bool is_numeric_type(const Json& prop) {
  auto it = prop.find("type");
  return it != prop.end() && it->is_string() && (*it == "number" || *it == "integer");
}

class Refinement {
 public:
  Refinement(const std::string& cls, std::vector<Diagnostic>& diags) : cls_(cls), diags_(diags) {}

  void observed_default(const std::string& arg, Json& prop, const Literal& lit) {
    std::optional<Json> before;
    if (prop.contains("default")) before = prop["default"];
    if (auto j = to_json(lit)) {
      prop["default"] = *j;
    } else {
      prop["default"] = nullptr;
      note(diag::kNonRepresentable, arg, "observed default " + render_python(lit) + " is not representable in JSON; using null");
    }
    if (before && *before != prop["default"] && !(before->is_number() && prop["default"].is_number() &&
                                                   before->get<double>() == prop["default"].get<double>())) {
      note(diag::kConflict, arg, "documented default " + before->dump() + " replaced by observed " + prop["default"].dump());
    }
  }

  void harvested(const std::string& arg, Json& prop, const std::vector<HarvestedValue>& values) {
    std::vector<Json> accepted;
    std::vector<Json> rejected;
    for (const auto& v : values) {
      if (v.verdict == Verdict::Accepted && std::find(accepted.begin(), accepted.end(), v.value) == accepted.end()) {
        accepted.push_back(v.value);
      }
      if (v.verdict == Verdict::Rejected) rejected.push_back(v.value);
    }
    if (prop.contains("enum")) {
      merge_into(arg, prop, accepted, rejected);
      return;
    }
    if (prop.value("type", Json()) == "string") {
      if (accepted.empty()) return;
      prop.erase("type");
      prop["enum"] = Json::array();
      merge_into(arg, prop, accepted, rejected);
      return;
    }
    auto any = prop.find("anyOf");
    if (any == prop.end() || !any->is_array()) return;
    // One enum member collects documented and harvested values; it takes the
    // place of a plain string member.
    std::optional<std::size_t> slot;
    Json merged = Json::object();
    merged["enum"] = Json::array();
    Json members = Json::array();
    for (const auto& m : *any) {
      bool is_enum = m.is_object() && m.contains("enum") && m.size() == 1 && m["enum"] != Json::array({nullptr});
      bool is_string = m.is_object() && m.size() == 1 && m.value("type", Json()) == "string";
      if (is_enum || (is_string && !accepted.empty())) {
        if (!slot) slot = members.size(), members.push_back(Json());
        if (is_enum) {
          for (const auto& v : m["enum"]) merged["enum"].push_back(v);
        }
        continue;
      }
      members.push_back(m);
    }
    if (!slot) return;
    merge_into(arg, merged, accepted, rejected);
    members[*slot] = std::move(merged);
    prop["anyOf"] = std::move(members);
  }

  void bounds(Json& prop, const NumericBound& b) {
    Json* target = &prop;
    if (!is_numeric_type(prop) && prop.contains("anyOf")) {
      for (auto& m : prop["anyOf"]) {
        if (is_numeric_type(m)) {
          apply_bounds(m, b);
          target = nullptr;
        }
      }
    }
    if (target) apply_bounds(*target, b);
  }

  void distribution(const std::string& arg, Json& prop, const RefineOptions& opts) {
    if (prop.contains("distribution") || !is_numeric_type(prop)) return;
    auto bound = [&](const char* soft, const char* hard) -> std::optional<double> {
      if (prop.contains(soft) && prop[soft].is_number()) return prop[soft].get<double>();
      if (prop.contains(hard) && prop[hard].is_number()) return prop[hard].get<double>();
      return std::nullopt;
    };
    auto lo = bound("minimumForOptimizer", "minimum");
    auto hi = bound("maximumForOptimizer", "maximum");
    if (!lo && !hi) return;
    bool log = contains(opts.loguniform_names, arg) || (lo && hi && *lo > 0 && *hi / *lo > opts.distribution_ratio);
    prop["distribution"] = log ? "loguniform" : "uniform";
  }

  void note(const char* kind, const std::string& arg, std::string msg) {
    diags_.push_back({kind, cls_, "__init__." + arg, std::move(msg)});
  }

 private:
  void merge_into(const std::string& arg, Json& holder, const std::vector<Json>& accepted, const std::vector<Json>& rejected) {
    Json& e = holder["enum"];
    for (const auto& v : accepted) {
      if (std::find(e.begin(), e.end(), v) == e.end()) {
        if (!e.empty()) note(diag::kConflict, arg, "accepted value " + v.dump() + " is not documented");
        e.push_back(v);
      }
    }
    Json kept = Json::array();
    for (const auto& v : e) {
      if (std::find(rejected.begin(), rejected.end(), v) == rejected.end()) kept.push_back(v);
    }
    if (kept.size() == e.size()) return;
    if (kept.empty()) {
      note(diag::kConflict, arg, "every documented value was rejected; enum kept");
      return;
    }
    for (const auto& v : e) {
      if (std::find(kept.begin(), kept.end(), v) == kept.end()) {
        note(diag::kConflict, arg, "documented value " + v.dump() + " was rejected");
      }
    }
    e = std::move(kept);
  }

  static void apply_bounds(Json& prop, const NumericBound& b) {
    if (b.min) {
      prop["minimum"] = *b.min;
      if (b.min_exclusive.value_or(false)) {
        prop["exclusiveMinimum"] = true;
      } else {
        prop.erase("exclusiveMinimum");
      }
    }
    if (b.max) {
      prop["maximum"] = *b.max;
      if (b.max_exclusive.value_or(false)) {
        prop["exclusiveMaximum"] = true;
      } else {
        prop.erase("exclusiveMaximum");
      }
    }
  }

  const std::string& cls_;
  std::vector<Diagnostic>& diags_;
};

// Returns false when some enum would become empty; that enum is kept as is
// since draft-04 forbids an empty enum.
bool remove_values(Json& prop, const std::vector<Json>& values) {
  if (!prop.is_object()) return true;
  bool ok = true;
  if (auto it = prop.find("enum"); it != prop.end() && it->is_array()) {
    Json kept = Json::array();
    for (const auto& v : *it) {
      if (std::find(values.begin(), values.end(), v) == values.end()) kept.push_back(v);
    }
    if (kept.empty()) {
      ok = false;
    } else {
      *it = std::move(kept);
    }
  }
  if (auto it = prop.find("anyOf"); it != prop.end() && it->is_array()) {
    for (auto& m : *it) ok = remove_values(m, values) && ok;
  }
  return ok;
}

}  // namespace

RefineResult refine(const OperatorSchemas& raw, const ObservationSet* obs, const Overrides& ov, const RefineOptions& opts) {
  if (obs && obs->class_name != raw.class_name) {
    throw std::invalid_argument("observations for '" + obs->class_name + "' given for class '" + raw.class_name + "'");
  }
  RefineResult out;
  out.schemas = raw;
  const std::string& cls = raw.class_name;
  Json& hp = out.schemas.hyperparams;
  if (!hp.contains("allOf") || !hp["allOf"].is_array() || hp["allOf"].empty() || !hp["allOf"][0].is_object()) {
    throw std::runtime_error("hyperparameter schema of '" + cls + "' has no main allOf element");
  }
  Json& main = hp["allOf"][0];
  if (!main.contains("properties") || !main["properties"].is_object()) main["properties"] = Json::object();
  Json& props = main["properties"];
  Refinement r(cls, out.diagnostics);

  std::vector<std::string> verbatim;
  for (auto it = props.begin(); it != props.end(); ++it) {
    const std::string& arg = it.key();
    Json& prop = *it;
    if (!prop.is_object()) continue;
    if (obs) {
      if (auto d = obs->observed_defaults.find(arg); d != obs->observed_defaults.end()) r.observed_default(arg, prop, d->second);
      if (auto h = obs->harvested_enums.find(arg); h != obs->harvested_enums.end()) r.harvested(arg, prop, h->second);
      if (auto b = obs->numeric_bounds.find(arg); b != obs->numeric_bounds.end()) r.bounds(prop, b->second);
    }
  }
  if (obs) {
    for (const auto& [arg, _] : obs->observed_defaults) {
      if (!props.contains(arg)) r.note(diag::kConflict, arg, "observation for an argument the schema does not have");
    }
  }

  // relevantToOptimizer
  std::vector<std::string> relevant;
  if (main.contains("relevantToOptimizer") && main["relevantToOptimizer"].is_array()) {
    for (const auto& n : main["relevantToOptimizer"]) {
      if (n.is_string()) relevant.push_back(n.get<std::string>());
    }
  }
  std::vector<std::string> kept;
  for (const auto& n : relevant) {
    const ArgOverride* o = ov.find(cls, n);
    bool exempt = o && !o->exclude_from_optimizer.value_or(false);
    if (contains(opts.optimizer_blocklist, n) && !exempt) continue;
    kept.push_back(n);
  }

  for (const auto& [arg, o] : ov.for_class(cls)) {
    if (!props.contains(arg)) {
      r.note(diag::kConflict, arg, "override for an argument the schema does not have");
      continue;
    }
    Json& prop = props[arg];
    if (o->schema) {
      prop = *o->schema;
      verbatim.push_back(arg);
    }
    if (o->distribution) prop["distribution"] = *o->distribution;
    if (o->minimum_for_optimizer) prop["minimumForOptimizer"] = *o->minimum_for_optimizer;
    if (o->maximum_for_optimizer) prop["maximumForOptimizer"] = *o->maximum_for_optimizer;
    if (o->blacklist && !remove_values(prop, *o->blacklist)) {
      r.note(diag::kConflict, arg, "blacklist would leave no admissible value; enum kept");
    }
    if (o->exclude_from_optimizer) {
      if (*o->exclude_from_optimizer) {
        kept.erase(std::remove(kept.begin(), kept.end(), arg), kept.end());
      } else if (!contains(kept, arg)) {
        kept.push_back(arg);
      }
    }
  }
  // after overrides, so their optimizer bounds count
  for (auto it = props.begin(); it != props.end(); ++it) {
    if (it->is_object() && !contains(verbatim, it.key())) r.distribution(it.key(), *it, opts);
  }

  // Keep property order in relevantToOptimizer.
  Json rel = Json::array();
  for (auto it = props.begin(); it != props.end(); ++it) {
    if (contains(kept, it.key())) rel.push_back(it.key());
  }
  main["relevantToOptimizer"] = std::move(rel);

  for (auto it = props.begin(); it != props.end(); ++it) {
    if (!contains(verbatim, it.key())) *it = canonical_order(*it);
    const Json& prop = *it;
    if (!prop.is_object() || !prop.contains("default")) continue;
    Json bare = prop;
    bare.erase("default");
    if (bare.contains("type") || bare.contains("enum") || bare.contains("anyOf")) {
      if (!validates(bare, prop["default"])) {
        r.note(diag::kDefaultMismatch, it.key(), "default " + prop["default"].dump() + " does not validate after refinement");
      }
    }
  }
  return out;
}

}  // namespace hpmine
