// End-to-end checks, one PASS/FAIL line each. Exit status is the number of
// failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>

#include "corpus.hpp"
#include "hpmine/constraint_cnl.hpp"
#include "hpmine/eval_harness.hpp"
#include "hpmine/json_schema.hpp"
#include "hpmine/pipeline.hpp"
#include "hpmine/refiner.hpp"
#include "hpmine/schema_assembler.hpp"
#include "hpmine/source_extractor.hpp"
#include "test_support.hpp"

using namespace hpmine;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " :: ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Runs a check, catching anything it throws.
void criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(name, ok, detail);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_secs(double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

bool contains_fragment(const Json& allof, const Json& fragment) {
  for (const auto& f : allof) {
    if (f == fragment) return true;
  }
  return false;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[e.path().lexically_relative(root).generic_string()] = testing::slurp(e.path());
  }
  return out;
}

// Docstring-shaped noise: numpydoc headers, entries, type words, trigger
// words, quotes and random UTF-8 spliced together.
std::string fuzz_module(std::mt19937& rng) {
  static const std::vector<std::string> bits = {
      "Parameters\n----------\n", "Returns\n-------\n", "Attributes\n----------\n", "    ", "        ", "\n",
      "alpha : float, default=1.0\n", "C : float, optional (default=1.0)\n", "solver : {'a', 'b'}, default='a'\n",
      "x : int or None, optional\n", "y : array-like, shape (n_samples, n_features)\n", "bad entry without colon\n",
      "Only used when solver='a'.\n", "Only relevant if penalty is 'l1'.\n", "supports only l2.\n", "If True, ",
      "default", "optional", "{", "}", "'", "\"", "\"\"\"", "(", ")", ",", "=", ":", "-", "\\", "\t", "None", "True",
      "nan", "inf", "1e-4", "0.5", "-3", "list of", "tuple", "string", "bool", "callable", "ignored", "\xc3\xa9",
      "\xe2\x88\x9e", "\xf0\x9f\x98\x80", "\xff", "\xc3", "\x00", "or", "and", "when", "is set to", "<=", ">"};
  std::uniform_int_distribution<int> nbits(0, 60);
  std::uniform_int_distribution<std::size_t> pick(0, bits.size() - 1);
  std::uniform_int_distribution<int> coin(0, 9);
  std::string doc;
  int n = nbits(rng);
  for (int i = 0; i < n; ++i) {
    if (coin(rng) == 0) {
      doc.push_back(static_cast<char>(rng() & 0xff));
    } else {
      doc += bits[pick(rng)];
    }
  }
  std::string params = coin(rng) < 5 ? "self, alpha=1.0, C=1.0, solver='a', x=None" : "self, y, *args, **kw";
  std::string src = "class Fuzz:\n    \"\"\"" + doc + "\"\"\"\n\n    def __init__(" + params +
                    "):\n        pass\n\n    def fit(self, X, y=None):\n        \"\"\"" + doc +
                    "\"\"\"\n        return self\n";
  if (coin(rng) == 0) {
    // raw bytes outside any docstring
    for (int i = 0; i < 40; ++i) src.push_back(static_cast<char>(rng() & 0xff));
  }
  return src;
}

}  // namespace

int main() {
  criterion("logistic-end-to-end-golden", [](std::string& d) {
    auto t0 = Clock::now();
    testing::TempDir raw("acc-raw"), ref("acc-ref");
    MineOptions opts;
    opts.library = "sklearn";
    run_mine({testing::fixture("logistic/logistic.py")}, Config(), raw.path(), opts);
    run_refine(raw.path(), testing::fixture("logistic/observations"), testing::fixture("logistic/overrides.json"), Config(),
               ref.path());
    Json got = testing::load_json(ref / "sklearn/LogisticRegression.json")["hyperparams"];
    double secs = seconds_since(t0);
    Json want = testing::load_json(testing::fixture("logistic/expected_hyperparams.json"));
    d = fmt_secs(secs);
    if (got != want) d += " mismatch: " + got.dump();
    return got == want && secs < 1.0;
  });

  criterion("grammar-corpus", [](std::string& d) {
    auto t0 = Clock::now();
    auto lines = testing::load_corpus();
    std::size_t ok = 0;
    std::string first_bad;
    for (const auto& l : lines) {
      std::string why = testing::check_corpus_line(l);
      if (why.empty()) {
        ++ok;
      } else if (first_bad.empty()) {
        first_bad = "line " + std::to_string(l.line_no) + ": " + why;
      }
    }
    double secs = seconds_since(t0);
    d = std::to_string(ok) + "/" + std::to_string(lines.size()) + " " + fmt_secs(secs);
    if (!first_bad.empty()) d += " " + first_bad;
    return lines.size() >= 30 && ok == lines.size() && secs < 1.0;
  });

  criterion("constraint-conservation", [](std::string& d) {
    testing::TempDir out("acc-cons");
    auto run = run_mine({testing::fixture("minilib"), testing::fixture("logistic/logistic.py")}, Config(), out.path());
    long flagged = 0, lowered = 0, todo = 0;
    for (const auto& c : run.classes) {
      for (const auto& r : c.op.constraints) {
        ++flagged;
        if (r.result.kind == ConstraintResult::Kind::Lowered) ++lowered;
        if (r.result.kind == ConstraintResult::Kind::Todo) ++todo;
      }
    }
    const Json& k = run.diagnostics["summary"]["constraints"];
    bool summary_ok = k["flagged"] == flagged && k["lowered"] == lowered && k["todo"] == todo;
    d = "flagged " + std::to_string(flagged) + " lowered " + std::to_string(lowered) + " todo " +
        std::to_string(todo);
    bool counts = flagged == lowered + todo && todo > 0 && lowered > 0 && summary_ok;

    Json mlp = testing::load_json(out / "minilib/MLPClassifier.json")["hyperparams"]["allOf"];
    Json power_t = Json::parse(R"({"description":"Only used when solver=sgd.","anyOf":[
        {"type":"object","properties":{"power_t":{"enum":[0.5]}}},
        {"type":"object","properties":{"solver":{"enum":["sgd"]}}}]})");
    bool pt = contains_fragment(mlp, power_t);
    if (!pt) d += " power_t fragment missing";

    Json lr = testing::load_json(out / "minilib/LogisticRegression.json")["hyperparams"]["allOf"];
    Json logistic = testing::load_json(testing::fixture("logistic/expected_hyperparams.json"))["allOf"][1];
    bool f2 = contains_fragment(lr, logistic);
    if (!f2) d += " logistic fragment missing";
    return counts && pt && f2;
  });

  criterion("metaschema-fuzz", [](std::string& d) {
    auto t0 = Clock::now();
    std::mt19937 rng(20240611);
    Triggers triggers;
    long classes = 0, schemas = 0;
    std::string bad;
    const int trials = 10000;
    for (int i = 0; i < trials && bad.empty(); ++i) {
      SourceFile src{"fuzz.py", fuzz_module(rng)};
      auto scan = scan_source(src);
      for (const auto& cls : scan.classes) {
        ++classes;
        auto op = mine_class(cls, triggers);
        for (const Json* s : {&op.schemas.hyperparams, &op.schemas.input_fit, &op.schemas.input_predict_or_transform,
                              &op.schemas.output}) {
          ++schemas;
          if (!check_metaschema(*s).empty()) bad = "trial " + std::to_string(i) + ": " + s->dump();
        }
        // refinement keeps validity too
        auto r = refine(op.schemas, nullptr, Overrides());
        if (!check_metaschema(r.schemas.hyperparams).empty()) bad = "refined trial " + std::to_string(i);
      }
    }
    double secs = seconds_since(t0);
    d = std::to_string(trials) + " modules, " + std::to_string(classes) + " classes, " + std::to_string(schemas) +
        " schemas, " + fmt_secs(secs);
    if (!bad.empty()) d += " invalid: " + bad.substr(0, 400);
    return bad.empty() && classes >= trials / 2 && secs < 60.0;
  });

  criterion("eval-oracle", [](std::string& d) {
    auto report = evaluate_dirs(testing::fixture("eval/generated"), testing::fixture("eval/curated"));
    Json expected = testing::load_json(testing::fixture("eval/expected.json"));
    bool ok = report.rows.size() == 5;
    for (const auto& row : report.rows) {
      for (const auto& cat : eval_categories()) {
        const Json& e = expected["classes"][row.class_name][cat];
        const auto& c = row.categories.at(cat);
        Json got = Json::array({c.reference, c.generated, c.match});
        if (c.detected) got.push_back(*c.detected);
        if (got != e) {
          ok = false;
          d += row.class_name + "." + cat + " ";
        }
      }
    }
    // a document compared with itself scores 1.0 throughout
    auto self = evaluate_dirs(testing::fixture("eval/curated"), testing::fixture("eval/curated"));
    for (const auto& [cat, c] : self.totals) {
      if (c.reference > 0 && (c.precision() != 1.0 || c.recall() != 1.0 || c.f1() != 1.0)) {
        ok = false;
        d += "identity:" + cat + " ";
      }
    }
    if (ok) d = "5 pairs, identity 1.0";
    return ok;
  });

  criterion("determinism", [](std::string& d) {
    testing::TempDir a("acc-det-a"), b("acc-det-b");
    std::vector<fs::path> in = {testing::fixture("minilib"), testing::fixture("logistic/logistic.py")};
    run_mine(in, Config(), a.path());
    run_mine(in, Config(), b.path());
    auto ta = tree_bytes(a.path()), tb = tree_bytes(b.path());
    d = std::to_string(ta.size()) + " files";
    return !ta.empty() && ta == tb;
  });

  return failures;
}
