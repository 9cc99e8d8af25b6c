// hpmine command line: mine, refine, eval, plan.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "hpmine/config.hpp"
#include "hpmine/eval_harness.hpp"
#include "hpmine/pipeline.hpp"

namespace fs = std::filesystem;
using namespace hpmine;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::string format = "table";
};

Config load_config(const Globals& g) {
  if (g.config.empty()) return Config();
  return Config::load(g.config);
}

fs::path out_dir(const Globals& g, const Config& cfg, const char* fallback) {
  if (!g.out.empty()) return g.out;
  if (cfg.output) return *cfg.output;
  return fallback;
}

void print_mine(const MineRun& run, const Globals& g) {
  if (g.format == "json") {
    std::cout << run.diagnostics["summary"].dump(2) << "\n";
    return;
  }
  for (const auto& c : run.classes) {
    std::printf("%-10s %s", c.status.c_str(), c.class_path.c_str());
    if (!c.reason.empty()) std::printf("  (%s)", c.reason.c_str());
    std::printf("\n");
  }
  const auto& s = run.diagnostics["summary"];
  const auto& k = s["constraints"];
  std::printf("%d schema(s) written; constraints: %ld flagged, %ld lowered, %ld todo\n", run.schemas_written,
              k["flagged"].get<long>(), k["lowered"].get<long>(), k["todo"].get<long>());
}

int cmd_mine(const Globals& g, const std::vector<std::string>& inputs, const std::string& library, bool plans_only) {
  Config cfg;
  try {
    cfg = load_config(g);
  } catch (const std::exception& e) {
    std::cerr << "hpmine: config error: " << e.what() << "\n";
    return 1;
  }
  MineOptions opts;
  if (!library.empty()) opts.library = library;
  if (plans_only) opts.write_schemas = false;
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  auto run = run_mine(paths, cfg, out_dir(g, cfg, "hpmine-out"), opts);
  print_mine(run, g);
  return run.schemas_written > 0 ? 0 : 2;
}

int cmd_refine(const Globals& g, const std::string& raw, const std::string& obs, const std::string& ov) {
  Config cfg;
  try {
    cfg = load_config(g);
  } catch (const std::exception& e) {
    std::cerr << "hpmine: config error: " << e.what() << "\n";
    return 1;
  }
  std::optional<fs::path> o, v;
  if (!obs.empty()) o = obs;
  else if (cfg.observations) o = cfg.observations;
  if (!ov.empty()) v = ov;
  else if (cfg.overrides) v = cfg.overrides;
  auto run = run_refine(raw, o, v, cfg, out_dir(g, cfg, "hpmine-refined"));
  if (g.format == "json") {
    std::cout << run.diagnostics["summary"].dump(2) << "\n";
  } else {
    std::printf("%d schema(s) refined, %d with observations, %zu diagnostic(s)\n", run.refined,
                run.with_observations, run.diagnostics["diagnostics"].size());
  }
  return 0;
}

int cmd_eval(const Globals& g, const std::string& gen, const std::string& cur, const std::string& raw) {
  std::optional<fs::path> r;
  if (!raw.empty()) r = raw;
  auto report = evaluate_dirs(gen, cur, r);
  std::string text = g.format == "json" ? report.to_json().dump(2) + "\n" : report.to_table();
  std::cout << text;
  if (!g.out.empty()) write_file(fs::path(g.out) / "report.json", dump_document(report.to_json()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine JSON Schema hyperparameter schemas from numpydoc docstrings"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"json", "table"}));

  std::vector<std::string> inputs;
  std::string library;
  auto* mine = app.add_subcommand("mine", "mine raw schemas and probe plans from Python sources");
  mine->fallthrough();
  mine->add_option("inputs", inputs, "source files or directories")->required();
  mine->add_option("--library", library, "library name used as output subdirectory");

  std::vector<std::string> plan_inputs;
  auto* plan = app.add_subcommand("plan", "write probe plans only");
  plan->fallthrough();
  plan->add_option("inputs", plan_inputs, "source files or directories")->required();

  std::string raw, obs, ov;
  auto* refine = app.add_subcommand("refine", "refine raw schemas with observations and overrides");
  refine->fallthrough();
  refine->add_option("raw", raw, "directory of raw schemas")->required()->check(CLI::ExistingDirectory);
  refine->add_option("--observations", obs, "directory of observation files")->check(CLI::ExistingDirectory);
  refine->add_option("--overrides", ov, "overrides file")->check(CLI::ExistingFile);

  std::string gen, cur, eraw;
  auto* eval = app.add_subcommand("eval", "compare generated schemas against curated ones");
  eval->fallthrough();
  eval->add_option("generated", gen)->required()->check(CLI::ExistingDirectory);
  eval->add_option("curated", cur)->required()->check(CLI::ExistingDirectory);
  eval->add_option("--raw", eraw, "raw schemas, for coverage attribution")->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mine) return cmd_mine(g, inputs, library, false);
    if (*plan) return cmd_mine(g, plan_inputs, library, true);
    if (*refine) return cmd_refine(g, raw, obs, ov);
    if (*eval) return cmd_eval(g, gen, cur, eraw);
  } catch (const std::exception& e) {
    std::cerr << "hpmine: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
