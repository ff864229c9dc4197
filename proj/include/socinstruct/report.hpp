#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/label_parser.hpp"
#include "socinstruct/metrics.hpp"
#include "socinstruct/prompt.hpp"
#include "socinstruct/registry.hpp"

namespace socinstruct {

struct TaskResult {
  std::string task_id;
  double macro_f1 = 0.0;  // raw, in [0, 1]
  std::int64_t n = 0;
  double invalid_rate = 0.0;
  double accuracy = 0.0;
  ConfusionMatrix confusion;

  bool operator==(const TaskResult&) const = default;
};

TaskResult score_task(const std::string& task_id, const ConfusionMatrix& cm);

struct EvalReport {
  std::string run_id;
  std::string system_name;
  PromptMode mode;
  std::vector<TaskResult> tasks;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::object();

  const TaskResult* find(std::string_view task_id) const;
  bool operator==(const EvalReport&) const = default;
};

nlohmann::ordered_json to_json(const EvalReport& r);
EvalReport eval_report_from_json(const nlohmann::ordered_json& j);
EvalReport read_report(const std::filesystem::path& path);

enum class ReportFormat { markdown, csv, json };

std::optional<ReportFormat> parse_report_format(std::string_view s);

// Tasks become rows in registry order under "Seen Tasks" / "Related Tasks";
// each report is one column, grouped by system with few-shot before
// zero-shot. Scores are macro-F1 x 100 with two decimals; "–" marks a task
// a report does not cover. Markdown bolds the best cell per row when there
// is more than one column. The json format is the list of reports and reads
// back with eval_report_from_json.
std::string render_results(std::span<const EvalReport> reports, ReportFormat format,
                           const Registry& registry = Registry::builtin());

// Two-decimal percentage, as printed in tables.
std::string format_score(double macro_f1);

enum class Verdict { win, tie, loss };

std::string_view to_string(Verdict v);

struct TaskComparison {
  std::string task_id;
  std::int64_t n = 0;
  double macro_f1_a = 0.0;
  double macro_f1_b = 0.0;
  SignificanceResult significance;
  Verdict verdict = Verdict::tie;
};

struct Comparison {
  std::string run_a;
  std::string run_b;
  double alpha = 0.05;
  std::vector<TaskComparison> tasks;
  std::vector<std::string> warnings;
  std::size_t better_or_equal = 0;

  // "A better-or-equal on X of Y tasks"
  std::string summary() const;
};

nlohmann::ordered_json to_json(const Comparison& c);
std::string render_comparison(const Comparison& c);

struct CompareOptions {
  double alpha = 0.05;
  BootstrapOptions bootstrap;
};

// Win when the one-sided p-value is below alpha; loss when the upper end of
// the interval is below zero; tie otherwise. Predictions are matched
// position by position within each task and must agree on target index and
// gold label, else AlignmentError.
Comparison compare_runs(const EvalReport& a, const EvalReport& b,
                        std::span<const ScoredPrediction> predictions_a,
                        std::span<const ScoredPrediction> predictions_b,
                        const CompareOptions& options = {},
                        const Registry& registry = Registry::builtin());

}  // namespace socinstruct
