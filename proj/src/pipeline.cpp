#include "hpmine/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "hpmine/eval_harness.hpp"
#include "hpmine/text.hpp"

namespace hpmine {

namespace fs = std::filesystem;

int log_level() {
  const char* v = std::getenv("HPMINE_VERBOSE");
  if (!v || !*v) return 0;
  return std::atoi(v);
}

void log(int level, const std::string& msg) {
  if (log_level() >= level) std::cerr << "hpmine: " << msg << "\n";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<fs::path> collect_sources(const std::vector<fs::path>& inputs) {
  std::set<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".py") out.insert(e.path().lexically_normal());
      }
    } else if (fs::is_regular_file(in)) {
      out.insert(in.lexically_normal());
    } else {
      throw std::runtime_error("input " + in.string() + " does not exist");
    }
  }
  return {out.begin(), out.end()};
}

std::string module_path(const fs::path& file, const fs::path& root) {
  fs::path rel;
  if (fs::is_directory(root)) {
    fs::path base = root.lexically_normal();
    if (base.filename().empty()) base = base.parent_path();
    rel = file.lexically_normal().lexically_relative(base.parent_path());
  } else {
    rel = file.filename();
  }
  std::vector<std::string> parts;
  for (const auto& p : rel) {
    auto s = p.string();
    if (s.empty() || s == ".") continue;
    parts.push_back(s);
  }
  if (parts.empty()) return file.stem().string();
  parts.back() = fs::path(parts.back()).stem().string();
  if (parts.back() == "__init__" && parts.size() > 1) parts.pop_back();
  return text::join(parts, ".");
}

namespace {

void collect_strings(const Json& s, std::vector<Json>& out) {
  if (!s.is_object()) return;
  if (auto it = s.find("enum"); it != s.end() && it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_null() && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  if (auto it = s.find("anyOf"); it != s.end() && it->is_array()) {
    for (const auto& m : *it) collect_strings(m, out);
  }
}

bool has_type(const Json& s, const char* type) {
  if (!s.is_object()) return false;
  if (s.value("type", Json()) == type) return true;
  if (auto it = s.find("anyOf"); it != s.end() && it->is_array()) {
    for (const auto& m : *it) {
      if (has_type(m, type)) return true;
    }
  }
  return false;
}

std::string task_of(const MinedClass& c) {
  const auto& name = c.op.schemas.class_name;
  auto has = [&](const char* s) { return name.find(s) != std::string::npos; };
  if (has("Classifier") || has("LogisticRegression") || has("SVC") || has("NB")) return "classification";
  if (has("Regressor") || has("Regression") || has("SVR") || has("Lasso") || has("Ridge")) return "regression";
  const auto& pt = c.op.schemas.input_predict_or_transform;
  if (pt.is_object() && !pt.empty() && c.op.schemas.output.empty()) return "transform";
  return "classification";
}

const Json& main_props(const Json& hp) {
  static const Json kEmpty = Json::object();
  if (!hp.contains("allOf") || hp["allOf"].empty()) return kEmpty;
  const Json& m = hp["allOf"][0];
  return m.contains("properties") ? m["properties"] : kEmpty;
}

}  // namespace

Json make_plan(const MinedClass& cls, const std::map<std::string, std::vector<Json>>& pool) {
  Json plan = Json::object();
  plan["class"] = cls.op.schemas.class_name;
  plan["class_path"] = cls.class_path;
  const Json& props = main_props(cls.op.schemas.hyperparams);
  Json args = Json::array();
  Json cands = Json::object();
  for (auto it = props.begin(); it != props.end(); ++it) {
    const std::string& arg = it.key();
    args.push_back(arg);
    Json c = Json::object();
    std::vector<Json> own;
    collect_strings(*it, own);
    c["enum"] = own;
    Json greedy = Json::array();
    if (auto p = pool.find(arg); p != pool.end()) {
      for (const auto& v : p->second) {
        if (std::find(own.begin(), own.end(), v) == own.end()) greedy.push_back(v);
      }
    }
    c["greedy"] = std::move(greedy);
    Json numeric = Json::array();
    bool number = has_type(*it, "number");
    if (number || has_type(*it, "integer")) {
      std::vector<double> xs = {0.0, 1.0};
      if (it->contains("default") && (*it)["default"].is_number()) {
        double d = (*it)["default"].get<double>();
        xs.insert(xs.end(), {d, d / 10, d * 10});
      }
      // documented endpoints get probed for exclusivity
      for (const char* k : {"minimum", "maximum"}) {
        if (it->contains(k) && (*it)[k].is_number()) xs.push_back((*it)[k].get<double>());
      }
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      for (double x : xs) {
        auto n = static_cast<std::int64_t>(x);
        if (static_cast<double>(n) == x && std::abs(x) < 1e15) {
          numeric.push_back(n);
        } else if (number) {
          numeric.push_back(x);
        }
      }
    }
    c["numeric"] = std::move(numeric);
    cands[arg] = std::move(c);
  }
  plan["args"] = std::move(args);
  plan["candidates"] = std::move(cands);
  Json ds = Json::object();
  ds["n_samples"] = 30;
  ds["n_features"] = 5;
  ds["task"] = task_of(cls);
  ds["seed"] = 0;
  plan["dataset"] = std::move(ds);
  plan["timeout"] = 10;
  return plan;
}

MineRun run_mine(const std::vector<fs::path>& inputs, const Config& cfg, const fs::path& out, const MineOptions& opts) {
  MineRun run;
  Triggers triggers(cfg.triggers);
  std::set<fs::path> outputs;

  for (const auto& input : inputs) {
    std::string library = opts.library ? *opts.library : cfg.library ? *cfg.library : "";
    if (library.empty()) {
      fs::path base = input.lexically_normal();
      if (base.filename().empty()) base = base.parent_path();
      library = fs::is_directory(input) ? base.filename().string() : "default";
    }
    for (const auto& file : collect_sources({input})) {
      std::string source = read_file(file);
      if (text::trim(source).empty()) {
        run.skipped_files.push_back(file.generic_string());
        log(1, "skipping empty file " + file.string());
        continue;
      }
      log(1, "scanning " + file.string());
      auto scan = scan_source({file, source});
      const std::string module = module_path(file, input);
      // one entry per malformed class, however many problems it has
      std::vector<std::string> order;
      std::map<std::string, std::vector<const SourceError*>> by_class;
      for (const auto& e : scan.errors) {
        run.malformed.emplace_back(file, e);
        if (e.class_name.empty()) continue;
        if (!by_class.count(e.class_name)) order.push_back(e.class_name);
        by_class[e.class_name].push_back(&e);
      }
      for (const auto& name : order) {
        MinedClass m;
        m.class_path = module + "." + name;
        m.library = library;
        m.source = file;
        m.op.schemas.class_name = name;
        m.status = "malformed";
        std::vector<std::string> msgs;
        for (const auto* e : by_class[name]) msgs.push_back(e->message);
        m.reason = text::join(msgs, "; ");
        for (const auto& msg : msgs) m.op.diagnostics.push_back({diag::kMalformedSource, name, "", msg});
        run.classes.push_back(std::move(m));
      }
      for (const auto& cls : scan.classes) {
        MinedClass m;
        m.class_path = module + "." + cls.class_name;
        m.library = library;
        m.source = file;
        if (!cfg.selects(cls.class_name)) {
          m.op.schemas.class_name = cls.class_name;
          m.status = "excluded";
          m.reason = "class name filtered by config";
          run.classes.push_back(std::move(m));
          continue;
        }
        m.op = mine_class(cls, triggers);
        m.output = fs::path(library) / (cls.class_name + ".json");
        if (!outputs.insert(m.output).second) {
          m.status = "excluded";
          m.reason = "another class named " + cls.class_name + " was already written to " + m.output.generic_string();
          m.output.clear();
        } else {
          m.status = "written";
        }
        run.classes.push_back(std::move(m));
      }
    }
  }

  std::vector<const MinedClass*> written;
  for (const auto& c : run.classes) {
    if (c.status == "written") written.push_back(&c);
  }
  std::sort(written.begin(), written.end(), [](const MinedClass* a, const MinedClass* b) {
    return a->op.schemas.class_name < b->op.schemas.class_name;
  });
  std::map<std::string, std::vector<Json>> pool;
  for (const auto* c : written) {
    const Json& props = main_props(c->op.schemas.hyperparams);
    for (auto it = props.begin(); it != props.end(); ++it) {
      std::vector<Json> vals;
      collect_strings(*it, vals);
      auto& dst = pool[it.key()];
      for (const auto& v : vals) {
        if (v.is_string() && std::find(dst.begin(), dst.end(), v) == dst.end()) dst.push_back(v);
      }
    }
  }

  for (const auto* c : written) {
    if (opts.write_schemas) write_file(out / c->output, dump_document(c->op.schemas.to_json()));
    if (opts.write_plans) {
      write_file(out / "plans" / (c->op.schemas.class_name + ".plan.json"), dump_document(make_plan(*c, pool)));
    }
    ++run.schemas_written;
  }

  // diagnostics.json
  std::map<std::string, long> by_kind;
  long flagged = 0, lowered = 0, todo = 0, duplicate = 0, excluded = 0, malformed = 0;
  Json classes = Json::array();
  for (const auto& c : run.classes) {
    Json j = Json::object();
    j["class"] = c.op.schemas.class_name;
    j["class_path"] = c.class_path;
    j["file"] = c.source.generic_string();
    j["status"] = c.status;
    if (!c.reason.empty()) j["reason"] = c.reason;
    if (!c.output.empty()) j["output"] = c.output.generic_string();
    Json d = Json::array();
    for (const auto& x : c.op.diagnostics) {
      d.push_back(x.to_json());
      by_kind[x.kind]++;
    }
    j["diagnostics"] = std::move(d);
    Json cs = Json::array();
    for (const auto& r : c.op.constraints) {
      cs.push_back(r.to_json());
      ++flagged;
      if (r.result.kind == ConstraintResult::Kind::Todo) {
        ++todo;
      } else {
        ++lowered;
        if (r.duplicate) ++duplicate;
      }
    }
    j["constraints"] = std::move(cs);
    if (c.status == "excluded") ++excluded;
    if (c.status == "malformed") ++malformed;
    classes.push_back(std::move(j));
  }
  Json errors = Json::array();
  for (const auto& [file, e] : run.malformed) {
    Json j = Json::object();
    j["file"] = file.generic_string();
    j["class"] = e.class_name;
    j["line"] = e.line;
    j["message"] = text::sanitize_utf8(e.message);
    errors.push_back(std::move(j));
  }
  Json summary = Json::object();
  summary["classes"] = run.classes.size();
  summary["schemas_written"] = run.schemas_written;
  summary["excluded"] = excluded;
  summary["malformed"] = malformed;
  summary["skipped_files"] = run.skipped_files;
  Json cons = Json::object();
  cons["flagged"] = flagged;
  cons["lowered"] = lowered;
  cons["todo"] = todo;
  cons["duplicate"] = duplicate;
  summary["constraints"] = std::move(cons);
  Json kinds = Json::object();
  for (const auto& [k, v] : by_kind) kinds[k] = v;
  summary["diagnostics_by_kind"] = std::move(kinds);

  run.diagnostics = Json::object();
  run.diagnostics["summary"] = std::move(summary);
  run.diagnostics["classes"] = std::move(classes);
  run.diagnostics["source_errors"] = std::move(errors);
  write_file(out / "diagnostics.json", dump_document(run.diagnostics));
  return run;
}

std::map<std::string, ObservationSet> load_observations(const fs::path& dir) {
  std::map<std::string, ObservationSet> out;
  if (!fs::is_directory(dir)) throw std::runtime_error("observations directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Json j;
    try {
      j = Json::parse(read_file(f));
    } catch (const Json::parse_error& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
    ObservationSet o;
    try {
      o = ObservationSet::from_json(j);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(f.string() + ": " + e.what());
    }
    auto name = o.class_name;
    if (!out.emplace(name, std::move(o)).second) throw std::runtime_error("two observation files for class " + name);
  }
  return out;
}

Overrides load_overrides(const fs::path& file) {
  Json j;
  try {
    j = Json::parse(read_file(file));
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
  try {
    return Overrides::from_json(j);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(file.string() + ": " + e.what());
  }
}

RefineRun run_refine(const fs::path& raw, const std::optional<fs::path>& observations,
                     const std::optional<fs::path>& overrides, const Config& cfg, const fs::path& out) {
  RefineRun run;
  std::map<std::string, ObservationSet> obs;
  if (observations) obs = load_observations(*observations);
  Overrides ov = overrides ? load_overrides(*overrides) : Overrides();

  if (!fs::is_directory(raw)) throw std::runtime_error(raw.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(raw)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    auto name = e.path().filename().string();
    if (name == "diagnostics.json" || name == "report.json") continue;
    if (name.size() > 10 && name.compare(name.size() - 10, 10, ".plan.json") == 0) continue;
    files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  Json diags = Json::array();
  std::set<std::string> used;
  for (const auto& f : files) {
    auto doc = load_operator_document(f);
    const ObservationSet* o = nullptr;
    if (auto it = obs.find(doc.class_name); it != obs.end()) {
      o = &it->second;
      used.insert(doc.class_name);
      ++run.with_observations;
    }
    log(1, "refining " + doc.class_name + (o ? " with observations" : ""));
    auto result = refine(doc, o, ov, cfg.refine);
    for (const auto& d : result.diagnostics) diags.push_back(d.to_json());
    write_file(out / f.lexically_relative(raw), dump_document(result.schemas.to_json()));
    ++run.refined;
  }
  Json unused = Json::array();
  for (const auto& [name, _] : obs) {
    if (!used.count(name)) unused.push_back(name);
  }
  Json summary = Json::object();
  summary["refined"] = run.refined;
  summary["with_observations"] = run.with_observations;
  summary["unused_observations"] = std::move(unused);
  run.diagnostics = Json::object();
  run.diagnostics["summary"] = std::move(summary);
  run.diagnostics["diagnostics"] = std::move(diags);
  write_file(out / "diagnostics.json", dump_document(run.diagnostics));
  return run;
}

}  // namespace hpmine
