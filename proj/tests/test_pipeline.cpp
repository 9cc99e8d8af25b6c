#include <doctest.h>

#include <set>

#include "hpmine/json_schema.hpp"
#include "hpmine/pipeline.hpp"
#include "hpmine/source_extractor.hpp"
#include "test_support.hpp"

using namespace hpmine;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = testing::slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("module paths") {
  fs::path root = testing::fixture("minilib");
  CHECK(module_path(root / "tree/_classes.py", root) == "minilib.tree._classes");
  CHECK(module_path(root / "__init__.py", root) == "minilib");
  CHECK(module_path(testing::fixture("logistic/logistic.py"), testing::fixture("logistic/logistic.py")) == "logistic");
}

TEST_CASE("mining the fixture tree") {
  testing::TempDir out("mine");
  Config cfg;
  auto run = run_mine({testing::fixture("minilib")}, cfg, out.path());
  CHECK(run.schemas_written == 7);
  CHECK(fs::exists(out / "minilib/LogisticRegression.json"));
  CHECK(fs::exists(out / "plans/MLPClassifier.plan.json"));
  CHECK(run.skipped_files.size() == 2);

  Json diags = testing::load_json(out / "diagnostics.json");
  CHECK(diags["summary"]["schemas_written"] == 7);
  const Json& k = diags["summary"]["constraints"];
  CHECK(k["flagged"].get<long>() == k["lowered"].get<long>() + k["todo"].get<long>());

  // every raw schema is a valid draft-04 document
  for (const auto& c : run.classes) {
    if (c.status != "written") continue;
    Json doc = testing::load_json(out.path() / c.output);
    CHECK(check_metaschema(doc["hyperparams"]).empty());
  }

  // plans follow their schema
  SchemaValidator plan_schema(testing::load_json(testing::source_dir() / "schemas/probe_plan.schema.json"));
  for (const auto& e : fs::directory_iterator(out / "plans")) {
    CAPTURE(e.path());
    CHECK(plan_schema.is_valid(testing::load_json(e.path())));
  }
  Json plan = testing::load_json(out / "plans/MLPClassifier.plan.json");
  CHECK(plan["class_path"] == "minilib.neural_network._mlp.MLPClassifier");
  CHECK(plan["candidates"]["solver"]["enum"] == Json::parse(R"(["lbfgs","sgd","adam"])"));
  // values documented for the same name on other classes
  CHECK(plan["candidates"]["solver"]["greedy"] == Json::parse(R"(["linear","sag"])"));
  CHECK(plan["dataset"]["task"] == "classification");
  CHECK(testing::load_json(out / "plans/OneHotEncoder.plan.json")["dataset"]["task"] == "transform");
}

TEST_CASE("every class is accounted for once") {
  testing::TempDir src("acct"), out("acct-out");
  testing::write(src / "pkg/a.py", "class Keep:\n    \"\"\"K.\"\"\"\n\nclass BaseThing:\n    pass\n");
  testing::write(src / "pkg/b.py",
                 "class Broken:\n    def __init__(self, a=(1,:\n        pass\n\nclass Keep:\n    pass\n"
                 "class Bad2:\n        x = 1\n    y = 2\n");
  testing::write(src / "pkg/c.py", "   \n");
  Config cfg = Config::from_json(Json::parse(R"({"exclude": ["Base*"]})"), src.path());
  auto run = run_mine({src / "pkg"}, cfg, out.path());
  std::map<std::string, std::string> status;
  for (const auto& c : run.classes) status[c.class_path] = c.status;
  CHECK(status == std::map<std::string, std::string>{{"pkg.a.Keep", "written"},
                                                     {"pkg.a.BaseThing", "excluded"},
                                                     {"pkg.b.Broken", "malformed"},
                                                     {"pkg.b.Keep", "excluded"},
                                                     {"pkg.b.Bad2", "malformed"}});
  std::size_t total = 0;
  for (const auto& f : collect_sources({src / "pkg"})) {
    total += count_top_level_classes(testing::slurp(f));
  }
  CHECK(run.classes.size() == total);
  Json d = testing::load_json(out / "diagnostics.json");
  CHECK(d["summary"]["malformed"] == 2);
  CHECK(d["summary"]["excluded"] == 2);
  CHECK(d["summary"]["skipped_files"].size() == 1);
}

TEST_CASE("mining is deterministic") {
  testing::TempDir a("det-a"), b("det-b");
  run_mine({testing::fixture("minilib")}, Config(), a.path());
  run_mine({testing::fixture("minilib")}, Config(), b.path());
  auto ta = tree_bytes(a.path());
  CHECK(ta.size() == 15);
  CHECK(ta == tree_bytes(b.path()));
}

TEST_CASE("refine over a directory") {
  testing::TempDir raw("raw"), ref("ref");
  MineOptions opts;
  opts.library = "sklearn";
  run_mine({testing::fixture("logistic/logistic.py")}, Config(), raw.path(), opts);
  auto run = run_refine(raw.path(), testing::fixture("logistic/observations"), testing::fixture("logistic/overrides.json"),
                        Config(), ref.path());
  CHECK(run.refined == 1);
  CHECK(run.with_observations == 1);
  Json doc = testing::load_json(ref / "sklearn/LogisticRegression.json");
  CHECK(doc["hyperparams"] == testing::load_json(testing::fixture("logistic/expected_hyperparams.json")));
  CHECK_FALSE(fs::exists(ref / "plans"));

  // no observations at all
  testing::TempDir bare("bare");
  auto r2 = run_refine(raw.path(), std::nullopt, std::nullopt, Config(), bare.path());
  CHECK(r2.with_observations == 0);
  Json d2 = testing::load_json(bare / "sklearn/LogisticRegression.json");
  CHECK_FALSE(d2["hyperparams"]["allOf"][0]["properties"]["C"].contains("distribution"));  // no bounds yet
  CHECK_FALSE(d2["hyperparams"]["allOf"][0]["properties"]["C"].contains("minimum"));
}

TEST_CASE("bad observation files name the file") {
  testing::TempDir obs("obs"), raw("raw2"), out("out2");
  testing::write(obs / "X.json", R"({"class_name": "X", "bogus": 1})");
  try {
    load_observations(obs.path());
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("X.json") != std::string::npos);
  }
}

TEST_CASE("command line") {
  testing::TempDir out("cli");
  std::string o = "--out \"" + out.path().string() + "\" ";
  std::string logistic = "\"" + testing::fixture("logistic/logistic.py").string() + "\"";
  CHECK(testing::run_cli(o + "mine " + logistic + " --library sklearn") == 0);
  CHECK(fs::exists(out / "sklearn/LogisticRegression.json"));

  testing::TempDir none("cli-none");
  testing::write(none / "src/empty.py", "x = 1\n");
  CHECK(testing::run_cli("--out \"" + (none / "out").string() + "\" mine \"" + (none / "src").string() + "\"") == 2);

  testing::write(none / "bad.json", R"({"unknown_key": 1})");
  CHECK(testing::run_cli("--config \"" + (none / "bad.json").string() + "\" --out \"" + (none / "o2").string() +
                         "\" mine " + logistic) == 1);

  testing::TempDir ref("cli-ref");
  CHECK(testing::run_cli("--out \"" + ref.path().string() + "\" refine \"" + out.path().string() +
                         "\" --observations \"" + testing::fixture("logistic/observations").string() +
                         "\" --overrides \"" + testing::fixture("logistic/overrides.json").string() + "\"") == 0);
  CHECK(testing::load_json(ref / "sklearn/LogisticRegression.json")["hyperparams"] ==
        testing::load_json(testing::fixture("logistic/expected_hyperparams.json")));

  std::string eval = "eval \"" + testing::fixture("eval/generated").string() + "\" \"" +
                     testing::fixture("eval/curated").string() + "\"";
  CHECK(testing::run_cli("--format json " + eval) == 0);
  CHECK(testing::run_cli("--format table " + eval) == 0);
  testing::TempDir empty("cli-empty");
  CHECK(testing::run_cli("eval \"" + testing::fixture("eval/generated").string() + "\" \"" + empty.path().string() + "\"") == 1);

  testing::TempDir plans("cli-plan");
  CHECK(testing::run_cli("--out \"" + plans.path().string() + "\" plan " + logistic) == 0);
  CHECK(fs::exists(plans / "plans/LogisticRegression.plan.json"));
  CHECK_FALSE(fs::exists(plans / "default/LogisticRegression.json"));

  CHECK(testing::run_cli("frobnicate") != 0);
  CHECK(testing::run_cli("--format xml " + eval) != 0);
}
