#include <doctest.h>

#include <random>

#include "hpmine/json_schema.hpp"
#include "hpmine/refiner.hpp"
#include "hpmine/schema_assembler.hpp"
#include "hpmine/source_extractor.hpp"
#include "test_support.hpp"

using namespace hpmine;

namespace {

OperatorSchemas mine_file(const std::string& rel, const std::string& cls) {
  auto r = scan_source({rel, testing::slurp(testing::fixture(rel))});
  for (const auto& c : r.classes) {
    if (c.class_name == cls) return mine_class(c, Triggers()).schemas;
  }
  FAIL("class not found");
  return {};
}

OperatorSchemas logistic_raw() { return mine_file("logistic/logistic.py", "LogisticRegression"); }

Json& props_of(OperatorSchemas& s) { return s.hyperparams["allOf"][0]["properties"]; }
const Json& props_of(const OperatorSchemas& s) { return s.hyperparams["allOf"][0]["properties"]; }

ObservationSet logistic_obs() {
  return ObservationSet::from_json(testing::load_json(testing::fixture("logistic/observations/LogisticRegression.json")));
}

Overrides logistic_overrides() { return Overrides::from_json(testing::load_json(testing::fixture("logistic/overrides.json"))); }

bool has_diag(const RefineResult& r, const std::string& kind, const std::string& loc) {
  for (const auto& d : r.diagnostics) {
    if (d.kind == kind && d.location == loc) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("logistic regression end to end") {
  auto obs = logistic_obs();
  auto r = refine(logistic_raw(), &obs, logistic_overrides());
  CHECK(r.schemas.hyperparams == testing::load_json(testing::fixture("logistic/expected_hyperparams.json")));
  CHECK(r.diagnostics.empty());
  // key order of C as in the golden file
  std::vector<std::string> keys;
  const Json& c = props_of(r.schemas)["C"];
  for (auto it = c.begin(); it != c.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"description", "type", "distribution", "minimum", "exclusiveMinimum", "default",
                                         "minimumForOptimizer", "maximumForOptimizer"});
}

TEST_CASE("nothing to apply leaves the raw schema alone apart from pruning") {
  auto raw = mine_file("minilib/ensemble/_gb.py", "GradientBoostingClassifier");
  RefineOptions no_dist;
  no_dist.loguniform_names.clear();
  auto r = refine(raw, nullptr, Overrides(), no_dist);
  Json expected = raw.hyperparams;
  Json& rel = expected["allOf"][0]["relevantToOptimizer"];
  Json kept = Json::array();
  for (const auto& n : rel) {
    if (n != "verbose" && n != "warm_start") kept.push_back(n);
  }
  rel = kept;
  CHECK(r.schemas.hyperparams == expected);
  CHECK(raw.hyperparams["allOf"][0]["required"] == r.schemas.hyperparams["allOf"][0]["required"]);
}

TEST_CASE("harvested values fill an under-specified string") {
  auto raw = mine_file("minilib/ensemble/_gb.py", "GradientBoostingClassifier");
  auto obs = ObservationSet::from_json(Json::parse(R"({
    "class_name": "GradientBoostingClassifier",
    "harvested_enums": {"criterion": [
      {"value": "friedman_mse", "verdict": "accepted"},
      {"value": "mse", "verdict": "accepted"},
      {"value": "mae", "verdict": "accepted"},
      {"value": "zzz_invalid", "verdict": "rejected", "message": "criterion must be one of ..."},
      {"value": "slow", "verdict": "timeout"}]}})"));
  auto r = refine(raw, &obs, Overrides());
  CHECK(props_of(r.schemas)["criterion"] ==
        Json::parse(R"({"description":"The function to measure the quality of a split.",
                        "enum":["friedman_mse","mse","mae"],"default":"friedman_mse"})"));
}

TEST_CASE("rejected values leave the enum") {
  auto raw = logistic_raw();
  auto obs = ObservationSet::from_json(Json::parse(R"({
    "class_name": "LogisticRegression",
    "harvested_enums": {"penalty": [{"value": "l1", "verdict": "rejected"}, {"value": "none", "verdict": "accepted"}]}})"));
  auto r = refine(raw, &obs, Overrides());
  CHECK(props_of(r.schemas)["penalty"]["enum"] == Json::parse(R"(["l2","none"])"));
}

TEST_CASE("observed defaults win and disagreements are reported") {
  auto raw = logistic_raw();
  auto obs = ObservationSet::from_json(Json::parse(R"({
    "class_name": "LogisticRegression",
    "observed_defaults": {"solver": "lbfgs", "C": {"__float__": "nan"}, "ghost": 1}})"));
  auto r = refine(raw, &obs, Overrides());
  CHECK(props_of(r.schemas)["solver"]["default"] == "lbfgs");
  CHECK(has_diag(r, diag::kConflict, "__init__.solver"));
  CHECK(props_of(r.schemas)["C"]["default"].is_null());
  CHECK(has_diag(r, diag::kNonRepresentable, "__init__.C"));
  CHECK(has_diag(r, diag::kConflict, "__init__.ghost"));
  // null is not a number, so the default no longer validates
  CHECK(has_diag(r, diag::kDefaultMismatch, "__init__.C"));
}

TEST_CASE("bounds and the distribution heuristic") {
  auto raw = mine_file("minilib/neural_network/_mlp.py", "MLPClassifier");
  auto obs = ObservationSet::from_json(Json::parse(R"({
    "class_name": "MLPClassifier",
    "numeric_bounds": {
      "momentum": {"min": 0, "max": 1},
      "power_t": {"min": 0.001, "max": 10, "max_exclusive": false},
      "alpha": {"min": 0, "min_exclusive": true}}})"));
  auto r = refine(raw, &obs, Overrides());
  const Json& p = props_of(r.schemas);
  CHECK(p["momentum"]["minimum"] == 0);
  CHECK(p["momentum"]["maximum"] == 1);
  CHECK_FALSE(p["momentum"].contains("exclusiveMinimum"));
  CHECK(p["momentum"]["distribution"] == "uniform");
  CHECK(p["power_t"]["distribution"] == "loguniform");  // 10 / 0.001 > 100
  CHECK_FALSE(p["power_t"].contains("exclusiveMaximum"));
  CHECK(p["alpha"]["distribution"] == "loguniform");  // scale-free name
  CHECK(p["alpha"]["exclusiveMinimum"] == true);
  // no bounds, no distribution
  CHECK_FALSE(p["solver"].contains("distribution"));
}

TEST_CASE("bounds land in the numeric member of a union") {
  OperatorSchemas raw;
  raw.class_name = "T";
  raw.hyperparams = Json::parse(R"({"allOf":[{"type":"object","relevantToOptimizer":["max_depth"],"properties":{
      "max_depth":{"anyOf":[{"type":"integer"},{"enum":[null]}],"default":null}}}]})");
  auto obs = ObservationSet::from_json(Json::parse(R"({"class_name":"T","numeric_bounds":{"max_depth":{"min":1}}})"));
  auto r = refine(raw, &obs, Overrides());
  CHECK(props_of(r.schemas)["max_depth"]["anyOf"][0] == Json::parse(R"({"type":"integer","minimum":1})"));
}

TEST_CASE("blocklist pruning and its exemptions") {
  auto raw = mine_file("minilib/ensemble/_gb.py", "GradientBoostingClassifier");
  auto keep = Overrides::from_json(Json::parse(R"({"GradientBoostingClassifier.warm_start": {"distribution": "uniform"}})"));
  auto r = refine(raw, nullptr, keep);
  const Json& rel = r.schemas.hyperparams["allOf"][0]["relevantToOptimizer"];
  CHECK(std::find(rel.begin(), rel.end(), Json("warm_start")) != rel.end());
  CHECK(std::find(rel.begin(), rel.end(), Json("verbose")) == rel.end());

  auto drop = Overrides::from_json(Json::parse(R"({"GradientBoostingClassifier.subsample": {"exclude_from_optimizer": true}})"));
  auto r2 = refine(raw, nullptr, drop);
  const Json& rel2 = r2.schemas.hyperparams["allOf"][0]["relevantToOptimizer"];
  CHECK(std::find(rel2.begin(), rel2.end(), Json("subsample")) == rel2.end());
  // still a property and still required
  CHECK(props_of(r2.schemas).contains("subsample"));
}

TEST_CASE("schema overrides replace the property verbatim") {
  auto raw = logistic_raw();
  auto ov = Overrides::from_json(Json::parse(R"({"LogisticRegression.penalty":
      {"schema": {"default": "l2", "enum": ["l1", "l2", "elasticnet", "none"]}}})"));
  auto r = refine(raw, nullptr, ov);
  CHECK(props_of(r.schemas)["penalty"].dump() == R"({"default":"l2","enum":["l1","l2","elasticnet","none"]})");
  auto bl = Overrides::from_json(Json::parse(R"({"LogisticRegression.solver": {"blacklist": ["sag"]}})"));
  CHECK(props_of(refine(raw, nullptr, bl).schemas)["solver"]["enum"] == Json::parse(R"(["linear","lbfgs"])"));
}

TEST_CASE("input validation") {
  auto raw = logistic_raw();
  ObservationSet other;
  other.class_name = "SVC";
  CHECK_THROWS_AS(refine(raw, &other, Overrides()), std::invalid_argument);
  CHECK_THROWS(Overrides::from_json(Json::parse(R"({"LogisticRegression.C": {"distrbution": "uniform"}})")));
  CHECK_THROWS(Overrides::from_json(Json::parse(R"({"no_dot": {}})")));
  CHECK_THROWS(Overrides::from_json(Json::parse(R"({"A.b": {"exclude_from_optimizer": "yes"}})")));
  CHECK_THROWS(ObservationSet::from_json(Json::parse(R"({"observed_defaults": {}})")));
  CHECK_THROWS(ObservationSet::from_json(Json::parse(R"({"class_name": "A", "surprise": 1})")));
  CHECK_THROWS(ObservationSet::from_json(
      Json::parse(R"({"class_name": "A", "harvested_enums": {"x": [{"value": "a", "verdict": "maybe"}]}})")));
  CHECK_THROWS(ObservationSet::from_json(Json::parse(R"({"class_name": "A", "numeric_bounds": {"x": {"min_exclusive": true}}})")));
}

TEST_CASE("observation files round-trip through the published schema") {
  auto obs = logistic_obs();
  Json j = obs.to_json();
  CHECK(SchemaValidator(observation_schema()).is_valid(j));
  CHECK(check_metaschema(observation_schema()).empty());
  auto back = ObservationSet::from_json(j);
  CHECK(back.to_json() == j);
}

namespace {

Json random_value(std::mt19937_64& rng) {
  switch (rng() % 5) {
    case 0: return Json(static_cast<int>(rng() % 10));
    case 1: return Json(std::uniform_real_distribution<double>(0.001, 100)(rng));
    case 2: return Json(std::vector<std::string>{"a", "l2", "sag", "linear", "gini"}[rng() % 5]);
    case 3: return Json(nullptr);
    default: return Json(static_cast<bool>(rng() & 1));
  }
}

struct Scenario {
  ObservationSet obs;
  Json ov_json = Json::object();
};

Scenario random_scenario(const OperatorSchemas& raw, std::mt19937_64& rng) {
  Scenario s;
  Json o = Json::object();
  o["class_name"] = raw.class_name;
  Json defaults = Json::object(), harvested = Json::object(), bounds = Json::object();
  for (auto it = props_of(raw).begin(); it != props_of(raw).end(); ++it) {
    const std::string& arg = it.key();
    if (rng() % 3 == 0) defaults[arg] = random_value(rng);
    if (rng() % 3 == 0) {
      Json items = Json::array();
      for (int k = 0, n = static_cast<int>(rng() % 4); k < n; ++k) {
        Json v = Json::object();
        v["value"] = std::vector<std::string>{"a", "b", "l2", "sag", "mse"}[rng() % 5];
        v["verdict"] = std::vector<std::string>{"accepted", "rejected", "timeout"}[rng() % 3];
        items.push_back(v);
      }
      harvested[arg] = items;
    }
    if (rng() % 3 == 0) {
      Json b = Json::object();
      double lo = std::uniform_real_distribution<double>(0, 2)(rng);
      b["min"] = lo;
      if (rng() & 1) b["min_exclusive"] = static_cast<bool>(rng() & 1);
      if (rng() & 1) b["max"] = lo + std::uniform_real_distribution<double>(0.5, 1000)(rng);
      bounds[arg] = b;
    }
    if (rng() % 3 == 0) {
      Json a = Json::object();
      if (rng() & 1) a["distribution"] = (rng() & 1) ? "uniform" : "loguniform";
      if (rng() & 1) a["minimumForOptimizer"] = static_cast<int>(rng() % 5);
      if (rng() & 1) a["maximumForOptimizer"] = 10 + static_cast<int>(rng() % 100);
      if (rng() & 1) a["exclude_from_optimizer"] = static_cast<bool>(rng() & 1);
      if (rng() % 4 == 0) a["schema"] = Json::parse(R"({"type":"integer","default":1})");
      if (rng() % 4 == 0) a["blacklist"] = Json::array({"sag", "a"});
      s.ov_json[raw.class_name + "." + arg] = a;
    }
  }
  o["observed_defaults"] = defaults;
  o["harvested_enums"] = harvested;
  o["numeric_bounds"] = bounds;
  s.obs = ObservationSet::from_json(o);
  return s;
}

}  // namespace

TEST_CASE("refinement properties over random observations and overrides") {
  std::vector<OperatorSchemas> raws = {
      logistic_raw(),
      mine_file("minilib/ensemble/_gb.py", "GradientBoostingClassifier"),
      mine_file("minilib/neural_network/_mlp.py", "MLPClassifier"),
      mine_file("minilib/tree/_classes.py", "DecisionTreeClassifier"),
      mine_file("minilib/preprocessing/_encoders.py", "OneHotEncoder"),
  };
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 400; ++trial) {
    const auto& raw = raws[trial % raws.size()];
    auto sc = random_scenario(raw, rng);
    auto ov = Overrides::from_json(sc.ov_json);
    CAPTURE(sc.obs.to_json().dump());
    CAPTURE(sc.ov_json.dump());
    auto once = refine(raw, &sc.obs, ov);
    auto twice = refine(once.schemas, &sc.obs, ov);
    CHECK(twice.schemas.hyperparams == once.schemas.hyperparams);

    const Json& props = props_of(once.schemas);
    // monotone safety
    for (auto it = props_of(raw).begin(); it != props_of(raw).end(); ++it) CHECK(props.contains(it.key()));
    CHECK(once.schemas.hyperparams["allOf"][0].value("required", Json::array()) ==
          raw.hyperparams["allOf"][0].value("required", Json::array()));

    // override supremacy
    const Json& rel = once.schemas.hyperparams["allOf"][0]["relevantToOptimizer"];
    for (auto it = sc.ov_json.begin(); it != sc.ov_json.end(); ++it) {
      std::string arg = it.key().substr(it.key().find('.') + 1);
      const Json& a = *it;
      const Json& p = props[arg];
      if (a.contains("schema") && !a.contains("blacklist")) {
        Json expect = a["schema"];
        for (const char* k : {"distribution", "minimumForOptimizer", "maximumForOptimizer"}) {
          if (a.contains(k)) expect[k] = a[k];
        }
        CHECK(p == expect);
      }
      for (const char* k : {"distribution", "minimumForOptimizer", "maximumForOptimizer"}) {
        if (a.contains(k)) CHECK(p[k] == a[k]);
      }
      if (a.contains("exclude_from_optimizer")) {
        bool in = std::find(rel.begin(), rel.end(), Json(arg)) != rel.end();
        CHECK(in == !a["exclude_from_optimizer"].get<bool>());
      }
      if (a.contains("blacklist") && p.contains("enum") && !has_diag(once, diag::kConflict, "__init__." + arg)) {
        for (const auto& v : a["blacklist"]) CHECK(std::find(p["enum"].begin(), p["enum"].end(), v) == p["enum"].end());
      }
    }

    // default membership
    for (auto it = props.begin(); it != props.end(); ++it) {
      if (!it->contains("default")) continue;
      Json bare = *it;
      bare.erase("default");
      if (validates(bare, (*it)["default"])) continue;
      CHECK(has_diag(once, diag::kDefaultMismatch, "__init__." + it.key()));
    }
    CHECK(check_metaschema(once.schemas.hyperparams).empty());
  }
}
