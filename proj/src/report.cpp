#include "socinstruct/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "socinstruct/errors.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace {

constexpr std::string_view kMissingCell = "–";

int mode_rank(const PromptMode& m) {
  switch (m.kind) {
    case PromptModeKind::few_shot: return 0;
    case PromptModeKind::zero_shot: return 1;
    case PromptModeKind::cross_task: return 2;
  }
  return 3;
}

// Column order: systems in order of first appearance, few-shot before
// zero-shot within a system.
std::vector<const EvalReport*> column_order(std::span<const EvalReport> reports) {
  std::map<std::string, std::size_t> first_seen;
  for (const auto& r : reports) first_seen.emplace(r.system_name, first_seen.size());
  std::vector<const EvalReport*> cols;
  for (const auto& r : reports) cols.push_back(&r);
  std::stable_sort(cols.begin(), cols.end(), [&](const EvalReport* x, const EvalReport* y) {
    const auto sx = first_seen.at(x->system_name);
    const auto sy = first_seen.at(y->system_name);
    if (sx != sy) return sx < sy;
    return mode_rank(x->mode) < mode_rank(y->mode);
  });
  return cols;
}

std::string column_title(const EvalReport& r) {
  return fmt::format("{} {}", r.system_name, r.mode.label());
}

struct Row {
  const TaskSpec* task;
  std::vector<std::optional<std::string>> cells;
};

struct Group {
  std::string title;
  std::vector<Row> rows;
};

std::vector<Group> build_table(const std::vector<const EvalReport*>& cols,
                               const Registry& registry) {
  std::set<std::string> covered;
  for (const auto* r : cols) {
    for (const auto& t : r->tasks) {
      registry.get(t.task_id);
      covered.insert(t.task_id);
    }
  }
  std::vector<Group> groups{{"Seen Tasks", {}}, {"Related Tasks", {}}};
  for (const auto& task : registry.tasks()) {
    if (!covered.count(task.task_id)) continue;
    Row row{&task, {}};
    for (const auto* r : cols) {
      const auto* result = r->find(task.task_id);
      row.cells.push_back(result ? std::optional(format_score(result->macro_f1)) : std::nullopt);
    }
    groups[task.role == Role::seen ? 0 : 1].rows.push_back(std::move(row));
  }
  std::erase_if(groups, [](const Group& g) { return g.rows.empty(); });
  return groups;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render_markdown(const std::vector<const EvalReport*>& cols,
                            const std::vector<Group>& groups) {
  std::string out = "| Task |";
  std::string rule = "|---|";
  for (const auto* c : cols) {
    out += fmt::format(" {} |", column_title(*c));
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  const bool bold = cols.size() >= 2;
  for (const auto& g : groups) {
    out += fmt::format("| **{}** |", g.title);
    for (std::size_t i = 0; i < cols.size(); ++i) out += " |";
    out += "\n";
    for (const auto& row : g.rows) {
      double best = -1.0;
      for (const auto& cell : row.cells) {
        if (cell) best = std::max(best, std::stod(*cell));
      }
      out += fmt::format("| {} |", row.task->display_name);
      for (const auto& cell : row.cells) {
        if (!cell) {
          out += fmt::format(" {} |", kMissingCell);
        } else if (bold && std::stod(*cell) == best) {
          out += fmt::format(" **{}** |", *cell);
        } else {
          out += fmt::format(" {} |", *cell);
        }
      }
      out += "\n";
    }
  }
  return out;
}

std::string render_csv(const std::vector<const EvalReport*>& cols,
                       const std::vector<Group>& groups) {
  std::string out = "group,task_id,task";
  for (const auto* c : cols) out += "," + csv_field(column_title(*c));
  out += "\n";
  for (const auto& g : groups) {
    for (const auto& row : g.rows) {
      out += fmt::format("{},{},{}", csv_field(g.title), row.task->task_id,
                         csv_field(row.task->display_name));
      for (const auto& cell : row.cells) {
        out += ",";
        out += cell ? *cell : std::string(kMissingCell);
      }
      out += "\n";
    }
  }
  return out;
}

std::map<std::string, std::vector<const ScoredPrediction*>> by_task(
    std::span<const ScoredPrediction> predictions) {
  std::map<std::string, std::vector<const ScoredPrediction*>> out;
  for (const auto& p : predictions) out[p.prediction.task_id].push_back(&p);
  return out;
}

}  // namespace

TaskResult score_task(const std::string& task_id, const ConfusionMatrix& cm) {
  TaskResult r;
  r.task_id = task_id;
  r.confusion = cm;
  r.confusion.task_id = task_id;
  r.macro_f1 = macro_f1(cm);
  r.n = cm.n;
  r.invalid_rate = invalid_rate(cm);
  r.accuracy = accuracy(cm);
  return r;
}

const TaskResult* EvalReport::find(std::string_view task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["system_name"] = r.system_name;
  j["mode"] = to_json(r.mode);
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : r.tasks) {
    nlohmann::ordered_json tj;
    tj["task_id"] = t.task_id;
    tj["macro_f1"] = t.macro_f1;
    tj["macro_f1_x100"] = format_score(t.macro_f1);
    tj["n"] = t.n;
    tj["invalid_rate"] = t.invalid_rate;
    tj["accuracy"] = t.accuracy;
    tj["confusion"] = to_json(t.confusion);
    j["tasks"].push_back(std::move(tj));
  }
  j["manifest"] = r.manifest;
  return j;
}

EvalReport eval_report_from_json(const nlohmann::ordered_json& j) {
  EvalReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.system_name = j.at("system_name").get<std::string>();
  r.mode = prompt_mode_from_json(j.at("mode"));
  for (const auto& tj : j.at("tasks")) {
    TaskResult t;
    t.task_id = tj.at("task_id").get<std::string>();
    t.macro_f1 = tj.at("macro_f1").get<double>();
    t.n = tj.at("n").get<std::int64_t>();
    t.invalid_rate = tj.at("invalid_rate").get<double>();
    t.accuracy = tj.value("accuracy", 0.0);
    t.confusion = confusion_from_json(nlohmann::json(tj.at("confusion")));
    t.confusion.task_id = t.task_id;
    r.tasks.push_back(std::move(t));
  }
  if (j.contains("manifest")) r.manifest = j["manifest"];
  return r;
}

EvalReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return eval_report_from_json(nlohmann::ordered_json::parse(in));
}

std::optional<ReportFormat> parse_report_format(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  return std::nullopt;
}

std::string format_score(double macro_f1) { return fmt::format("{:.2f}", macro_f1 * 100.0); }

std::string render_results(std::span<const EvalReport> reports, ReportFormat format,
                           const Registry& registry) {
  if (reports.empty()) throw Error("render_results needs at least one report");
  const auto cols = column_order(reports);
  if (format == ReportFormat::json) {
    auto j = nlohmann::ordered_json::array();
    for (const auto* r : cols) j.push_back(to_json(*r));
    return j.dump(2) + "\n";
  }
  const auto groups = build_table(cols, registry);
  return format == ReportFormat::markdown ? render_markdown(cols, groups)
                                          : render_csv(cols, groups);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::win: return "win";
    case Verdict::tie: return "tie";
    case Verdict::loss: return "loss";
  }
  return "tie";
}

std::string Comparison::summary() const {
  return fmt::format("A better-or-equal on {} of {} tasks", better_or_equal, tasks.size());
}

nlohmann::ordered_json to_json(const Comparison& c) {
  nlohmann::ordered_json j;
  j["run_a"] = c.run_a;
  j["run_b"] = c.run_b;
  j["alpha"] = c.alpha;
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : c.tasks) {
    nlohmann::ordered_json tj;
    tj["task_id"] = t.task_id;
    tj["n"] = t.n;
    tj["macro_f1_a"] = t.macro_f1_a;
    tj["macro_f1_b"] = t.macro_f1_b;
    tj["significance"] = to_json(t.significance);
    tj["verdict"] = to_string(t.verdict);
    j["tasks"].push_back(std::move(tj));
  }
  j["warnings"] = c.warnings;
  j["better_or_equal"] = c.better_or_equal;
  j["summary"] = c.summary();
  return j;
}

std::string render_comparison(const Comparison& c) {
  std::string out = fmt::format("# {} vs {}\n\n", c.run_a, c.run_b);
  out += "| Task | A | B | Delta | p | 95% CI | Verdict |\n";
  out += "|---|---:|---:|---:|---:|---|---|\n";
  for (const auto& t : c.tasks) {
    const auto& s = t.significance;
    out += fmt::format("| {} | {} | {} | {:+.2f} | {:.4f} | [{:+.2f}, {:+.2f}] | {} |\n",
                       t.task_id, format_score(t.macro_f1_a), format_score(t.macro_f1_b),
                       s.delta_observed * 100.0, s.p_value, s.ci_low * 100.0,
                       s.ci_high * 100.0, to_string(t.verdict));
  }
  for (const auto& w : c.warnings) out += fmt::format("\nwarning: {}\n", w);
  out += fmt::format("\n{}\n", c.summary());
  return out;
}

Comparison compare_runs(const EvalReport& a, const EvalReport& b,
                        std::span<const ScoredPrediction> predictions_a,
                        std::span<const ScoredPrediction> predictions_b,
                        const CompareOptions& options, const Registry& registry) {
  Comparison c;
  c.run_a = a.run_id;
  c.run_b = b.run_id;
  c.alpha = options.alpha;

  const auto pa = by_task(predictions_a);
  const auto pb = by_task(predictions_b);

  std::vector<std::string> only_a;
  std::vector<std::string> only_b;
  for (const auto& task : registry.tasks()) {
    const bool in_a = a.find(task.task_id) != nullptr;
    const bool in_b = b.find(task.task_id) != nullptr;
    if (in_a && !in_b) only_a.push_back(task.task_id);
    if (in_b && !in_a) only_b.push_back(task.task_id);
    if (!in_a || !in_b) continue;

    const auto ia = pa.find(task.task_id);
    const auto ib = pb.find(task.task_id);
    if (ia == pa.end() || ib == pb.end()) {
      throw AlignmentError(fmt::format("no predictions for task {} in one of the runs",
                                       task.task_id));
    }
    const auto& xa = ia->second;
    const auto& xb = ib->second;
    if (xa.size() != xb.size()) {
      throw AlignmentError(fmt::format("task {}: {} predictions in A vs {} in B", task.task_id,
                                       xa.size(), xb.size()));
    }
    std::vector<std::string> golds;
    std::vector<std::optional<std::string>> preds_a;
    std::vector<std::optional<std::string>> preds_b;
    for (std::size_t i = 0; i < xa.size(); ++i) {
      if (xa[i]->target_source_index != xb[i]->target_source_index) {
        throw AlignmentError(fmt::format("task {} position {}: target index {} vs {}",
                                         task.task_id, i, xa[i]->target_source_index,
                                         xb[i]->target_source_index));
      }
      if (xa[i]->gold != xb[i]->gold) {
        throw AlignmentError(fmt::format("task {} position {}: gold '{}' vs '{}'", task.task_id,
                                         i, xa[i]->gold, xb[i]->gold));
      }
      golds.push_back(xa[i]->gold);
      preds_a.push_back(xa[i]->prediction.parsed);
      preds_b.push_back(xb[i]->prediction.parsed);
    }

    TaskComparison tc;
    tc.task_id = task.task_id;
    tc.n = static_cast<std::int64_t>(golds.size());
    tc.macro_f1_a = macro_f1(confusion(golds, preds_a, task.label_set));
    tc.macro_f1_b = macro_f1(confusion(golds, preds_b, task.label_set));
    tc.significance = paired_bootstrap(golds, preds_a, preds_b, task.label_set,
                                       options.bootstrap);
    if (tc.significance.p_value < options.alpha) {
      tc.verdict = Verdict::win;
    } else if (tc.significance.ci_high < 0.0) {
      tc.verdict = Verdict::loss;
    } else {
      tc.verdict = Verdict::tie;
    }
    if (tc.verdict != Verdict::loss) ++c.better_or_equal;
    c.tasks.push_back(std::move(tc));
  }

  if (c.tasks.empty()) c.warnings.push_back("runs share no tasks; nothing to compare");
  if (!only_a.empty()) c.warnings.push_back("only in " + a.run_id + ": " + join(only_a, ", "));
  if (!only_b.empty()) c.warnings.push_back("only in " + b.run_id + ": " + join(only_b, ", "));
  return c;
}

}  // namespace socinstruct
