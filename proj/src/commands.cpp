#include "socinstruct/commands.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "socinstruct/eval.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace fs = std::filesystem;

namespace {

std::string count_cell(const TaskStats& ts, Split split) {
  auto it = ts.counts.find(split);
  return it == ts.counts.end() ? "-" : std::to_string(it->second);
}

void print_stats(const CorpusStats& stats, const Registry& registry, std::ostream& out) {
  fmt::print(out, "{:<24} {:>8} {:>10} {:>8}\n", "task", "train", "validation", "test");
  for (const auto& task : registry.tasks()) {
    auto it = stats.tasks.find(task.task_id);
    if (it == stats.tasks.end()) continue;
    fmt::print(out, "{:<24} {:>8} {:>10} {:>8}\n", task.task_id,
               count_cell(it->second, Split::train), count_cell(it->second, Split::validation),
               count_cell(it->second, Split::test));
  }
  fmt::print(out, "total_train {}\n", stats.total_train);
}

void print_validation(const ValidationReport& report, std::ostream& out, std::ostream& err) {
  for (const auto& v : report.violations) {
    fmt::print(err, "{}: {}:{}: [{}] {}\n", to_string(v.kind), v.file, v.line, v.task_id,
               v.message);
  }
  for (const auto& note : report.notes) fmt::print(out, "note: {}\n", note);
  fmt::print(out, "validated {} files, {} instances, {} violations\n", report.files_checked,
             report.instances_checked, report.violations.size());
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

int cmd_tasks(const std::vector<std::string>& selection, std::ostream& out, std::ostream& err,
              const Registry& registry) {
  try {
    const auto ids = registry.resolve(selection.empty() ? std::vector<std::string>{"all"}
                                                        : selection);
    for (const auto& id : ids) {
      const auto& t = registry.get(id);
      fmt::print(out, "{:<24} {:<7} {:<18} {:<28} {}\n", t.task_id, to_string(t.role),
                 to_string(t.category), t.display_name, join(t.label_set, " | "));
    }
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
}

int cmd_compile(const CompileConfig& cfg, std::ostream& out, std::ostream& err,
                const Registry& registry) {
  std::vector<std::string> diagnostics;
  RawSources sources;
  std::vector<std::string> task_ids;
  try {
    task_ids = registry.resolve(cfg.tasks);
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }

  if (cfg.raw_dir) {
    if (!fs::is_directory(*cfg.raw_dir)) {
      diagnostics.push_back(fmt::format("raw_dir {} does not exist", cfg.raw_dir->string()));
    } else {
      sources = discover_raw_sources(*cfg.raw_dir, task_ids);
    }
  }
  for (const auto& [task_id, splits] : cfg.files) {
    if (!registry.contains(task_id)) {
      diagnostics.push_back(fmt::format("files: unknown task '{}'", task_id));
      continue;
    }
    for (const auto& [split, path] : splits) {
      if (!fs::exists(path)) {
        diagnostics.push_back(fmt::format("{} {}: file not found: {}", task_id,
                                          to_string(split), path.string()));
      } else {
        sources[task_id][split] = path;
      }
    }
  }
  if (diagnostics.empty()) {
    for (const auto& id : task_ids) {
      if (!sources.count(id)) diagnostics.push_back(fmt::format("{}: no raw files found", id));
    }
  }
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics) fmt::print(err, "error: {}\n", d);
    return kExitInputError;
  }

  CompileOptions options;
  options.seed = cfg.seed;
  options.max_errors = cfg.max_errors;
  options.cap.stratified = cfg.stratified_cap;
  CompileResult result;
  try {
    result = compile_corpus(sources, cfg.out_dir, options, registry);
  } catch (const CompileError& e) {
    for (const auto& r : e.errors()) {
      fmt::print(err, "{}:{}: {}\n", r.file.string(), r.line, r.message);
    }
    fmt::print(err, "error: {}\n", e.what());
    return kExitValidationFailed;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
  for (const auto& r : result.errors) {
    fmt::print(err, "skipped {}:{}: {}\n", r.file.string(), r.line, r.message);
  }
  print_stats(result.stats, registry, out);

  ValidateOptions vopts;
  vopts.templates_dir = cfg.templates_dir;
  vopts.check_expected_splits = cfg.check_expected_splits;
  const auto report = validate_corpus(cfg.out_dir, vopts, registry);
  if (cfg.check_expected_splits) {
    for (const auto& note : reconcile_with_registry(result.stats, registry)) {
      fmt::print(out, "note: {}\n", note);
    }
  }
  print_validation(report, out, err);
  return report.ok() ? kExitOk : kExitValidationFailed;
}

int cmd_validate(const fs::path& corpus_dir, const ValidateOptions& options, std::ostream& out,
                 std::ostream& err, const Registry& registry) {
  if (!fs::is_directory(corpus_dir)) {
    fmt::print(err, "error: corpus directory {} does not exist\n", corpus_dir.string());
    return kExitInputError;
  }
  const auto report = validate_corpus(corpus_dir, options, registry);
  print_validation(report, out, err);
  return report.ok() ? kExitOk : kExitValidationFailed;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err,
             const Registry& registry) {
  EvalOutcome outcome;
  try {
    outcome = run_eval(cfg, registry);
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
  if (!outcome.scored) {
    fmt::print(err, "error: {}; checkpoint kept at {}\n",
               outcome.batch.summary_error.value_or("batch incomplete"),
               (outcome.run_dir / "generations.jsonl").string());
    return kExitBackendError;
  }
  if (outcome.batch.summary_error) fmt::print(err, "warning: {}\n", *outcome.batch.summary_error);
  if (outcome.batch.resumed) {
    fmt::print(out, "resumed {} generations from checkpoint\n", outcome.batch.resumed);
  }
  const std::vector<EvalReport> one{outcome.report};
  out << render_results(one, ReportFormat::markdown, registry);
  fmt::print(out, "wrote {}\n", outcome.run_dir.string());
  return kExitOk;
}

int cmd_compare(const fs::path& run_a, const fs::path& run_b, const CompareOptions& options,
                const std::optional<fs::path>& out_dir, std::ostream& out, std::ostream& err,
                const Registry& registry) {
  Comparison c;
  try {
    const auto a = read_report(run_a / "report.json");
    const auto b = read_report(run_b / "report.json");
    const auto pa = read_predictions(run_a / "predictions.jsonl");
    const auto pb = read_predictions(run_b / "predictions.jsonl");
    c = compare_runs(a, b, pa, pb, options, registry);
  } catch (const AlignmentError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitAlignmentError;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
  const auto dir = out_dir.value_or(run_a);
  write_text(dir / "compare.json", to_json(c).dump(2) + "\n");
  const auto doc = render_comparison(c);
  write_text(dir / "compare.md", doc);
  for (const auto& w : c.warnings) fmt::print(err, "warning: {}\n", w);
  out << doc;
  return kExitOk;
}

int cmd_report(const std::vector<fs::path>& runs, ReportFormat format,
               const std::optional<fs::path>& out_path, std::ostream& out, std::ostream& err,
               const Registry& registry) {
  std::vector<EvalReport> reports;
  try {
    if (runs.empty()) throw Error("report needs at least one run directory");
    for (const auto& r : runs) {
      reports.push_back(read_report(fs::is_directory(r) ? r / "report.json" : r));
    }
    const auto doc = render_results(reports, format, registry);
    if (out_path) {
      write_text(*out_path, doc);
    } else {
      out << doc;
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
  return kExitOk;
}

int cmd_fixtures(const fs::path& out_dir, const FixtureOptions& options, std::ostream& out,
                 std::ostream& err, const Registry& registry) {
  try {
    const auto m = generate_fixtures(out_dir, options, registry);
    std::int64_t records = 0;
    for (const auto& [id, t] : m.tasks) {
      for (const auto& [split, n] : t.counts) records += n;
    }
    fmt::print(out, "wrote {} raw records for {} tasks into {} (compiled train total {})\n",
               records, m.tasks.size(), out_dir.string(), m.compiled_train_total());
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInputError;
  }
}

}  // namespace socinstruct
