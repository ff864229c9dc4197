#include <iostream>

#include <CLI11.hpp>

#include "socinstruct/commands.hpp"

using namespace socinstruct;

int main(int argc, char** argv) {
  CLI::App app{"socinstruct: social-task instruction corpus compiler and evaluation harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> tasks;
  std::optional<std::string> task_defs;
  app.add_option("--config", config_path, "TOML config file");
  app.add_option("--task-defs", task_defs, "Extra task definitions (.toml or .json)");
  app.add_option("--seed", seed, "Override every seed in the config");
  app.add_option("--out-dir", out_dir, "Override the output directory");
  app.add_option("--tasks", tasks, "Task slugs, categories, seen, related or all")
      ->delimiter(',');

  auto* tasks_cmd = app.add_subcommand("tasks", "List registered tasks");
  std::vector<std::string> selection;
  tasks_cmd->add_option("selection", selection, "Slugs, categories, seen, related or all");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "Write synthetic raw fixtures");
  FixtureOptions fixture_options;
  bool full_shape = false;
  fixtures_cmd->add_option("--scale", fixture_options.scale, "Fraction of published counts");
  fixtures_cmd->add_option("--min-per-split", fixture_options.min_per_split);
  fixtures_cmd->add_flag("--full-shape", full_shape,
                         "Train split at published size, with the cap exercised");

  auto* compile_cmd = app.add_subcommand("compile", "Compile raw files into instruction JSONL");
  std::optional<std::string> raw_dir;
  std::optional<std::string> compile_templates;
  bool check_expected = false;
  compile_cmd->add_option("--raw-dir", raw_dir);
  compile_cmd->add_option("--templates-dir", compile_templates);
  compile_cmd->add_flag("--check-expected", check_expected,
                        "Compare counts with the published split sizes");

  auto* validate_cmd = app.add_subcommand("validate", "Check a compiled corpus");
  std::optional<std::string> corpus_dir;
  std::optional<std::string> validate_templates;
  bool validate_expected = false;
  validate_cmd->add_option("corpus", corpus_dir, "Compiled corpus directory");
  validate_cmd->add_option("--templates-dir", validate_templates);
  validate_cmd->add_flag("--check-expected", validate_expected);

  auto* eval_cmd = app.add_subcommand("eval", "Prompt a backend and score the answers");
  std::optional<std::string> run_id;
  eval_cmd->add_option("--run-id", run_id);

  auto* compare_cmd = app.add_subcommand("compare", "Paired bootstrap between two runs");
  std::string run_a;
  std::string run_b;
  CompareOptions compare_options;
  compare_cmd->add_option("run_a", run_a)->required();
  compare_cmd->add_option("run_b", run_b)->required();
  compare_cmd->add_option("--alpha", compare_options.alpha);
  std::optional<std::int64_t> resamples;
  compare_cmd->add_option("--resamples", resamples);
  compare_cmd->add_flag("--two-sided", compare_options.bootstrap.two_sided);

  auto* report_cmd = app.add_subcommand("report", "Render run reports as one table");
  std::vector<std::string> runs;
  std::string format_name = "markdown";
  std::optional<std::string> report_out;
  report_cmd->add_option("runs", runs, "Run directories")->required();
  report_cmd->add_option("--format", format_name)
      ->check(CLI::IsMember({"markdown", "md", "csv", "json"}));
  report_cmd->add_option("--out", report_out);

  CLI11_PARSE(app, argc, argv);

  AppConfig cfg;
  Registry registry = Registry::builtin();
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (task_defs) registry = registry.extended(load_task_definitions(*task_defs));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  if (seed) {
    cfg.compile.seed = *seed;
    cfg.run.seed = *seed;
    cfg.run.bootstrap.seed = *seed;
    fixture_options.seed = *seed;
    compare_options.bootstrap.seed = *seed;
  } else {
    compare_options.bootstrap.seed = cfg.run.bootstrap.seed;
  }
  if (out_dir) {
    cfg.compile.out_dir = *out_dir;
    cfg.run.out_dir = *out_dir;
  }
  if (!tasks.empty()) {
    cfg.compile.tasks = tasks;
    cfg.run.tasks = tasks;
  }

  auto& out = std::cout;
  auto& err = std::cerr;

  if (*tasks_cmd) return cmd_tasks(selection.empty() ? tasks : selection, out, err, registry);

  if (*fixtures_cmd) {
    if (full_shape) {
      auto s = fixture_options.seed;
      fixture_options = full_shape_options(s);
    }
    fixture_options.tasks = tasks;
    return cmd_fixtures(out_dir.value_or("fixtures"), fixture_options, out, err, registry);
  }

  if (*compile_cmd) {
    if (raw_dir) cfg.compile.raw_dir = *raw_dir;
    if (compile_templates) cfg.compile.templates_dir = *compile_templates;
    if (check_expected) cfg.compile.check_expected_splits = true;
    return cmd_compile(cfg.compile, out, err, registry);
  }

  if (*validate_cmd) {
    ValidateOptions options;
    if (validate_templates) {
      options.templates_dir = *validate_templates;
    } else {
      options.templates_dir = cfg.compile.templates_dir;
    }
    options.check_expected_splits = validate_expected || cfg.compile.check_expected_splits;
    const std::filesystem::path dir = corpus_dir ? std::filesystem::path(*corpus_dir)
                                                 : cfg.compile.out_dir;
    return cmd_validate(dir, options, out, err, registry);
  }

  if (*eval_cmd) {
    if (run_id) cfg.run.run_id = *run_id;
    return cmd_eval(cfg.run, out, err, registry);
  }

  if (*compare_cmd) {
    compare_options.bootstrap.resamples = resamples.value_or(cfg.run.bootstrap.resamples);
    compare_options.bootstrap.two_sided |= cfg.run.bootstrap.two_sided;
    std::optional<std::filesystem::path> dir;
    if (out_dir) dir = *out_dir;
    return cmd_compare(run_a, run_b, compare_options, dir, out, err, registry);
  }

  if (*report_cmd) {
    std::vector<std::filesystem::path> paths(runs.begin(), runs.end());
    std::optional<std::filesystem::path> path;
    if (report_out) path = *report_out;
    return cmd_report(paths, *parse_report_format(format_name), path, out, err, registry);
  }
  return kExitInputError;
}
