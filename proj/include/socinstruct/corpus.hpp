#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/errors.hpp"
#include "socinstruct/registry.hpp"

namespace socinstruct {

// Canonical ingestion schema: one JSON object per line of
// <task_id>.<split>.raw.jsonl. Threshold tasks carry a score, the rest a label.
struct RawRecord {
  std::string task_id;
  Split split = Split::train;
  std::map<std::string, std::string> fields;
  std::optional<double> score;
  std::optional<std::string> label;

  bool operator==(const RawRecord&) const = default;
};

nlohmann::ordered_json to_json(const RawRecord& r);
RawRecord raw_record_from_json(const nlohmann::json& j);

struct InstructionInstance {
  std::string task_id;
  Split split = Split::train;
  std::string instruction;
  std::string input;
  std::string gold;
  std::int64_t source_index = 0;

  bool operator==(const InstructionInstance&) const = default;
};

// Keys in fixed order: task_id, split, instruction, input, gold, source_index.
nlohmann::ordered_json to_json(const InstructionInstance& inst);
InstructionInstance instance_from_json(const nlohmann::json& j);

std::vector<InstructionInstance> read_instances(const std::filesystem::path& path);
void write_instances(const std::filesystem::path& path,
                     const std::vector<InstructionInstance>& instances);

// Throws InvalidScore on a non-finite score.
std::string binarize_score(const ThresholdRule& rule, double score);

// Throws MissingField, UnknownLabel or InvalidScore.
InstructionInstance reframe_record(const TaskSpec& task, const RawRecord& raw,
                                   std::int64_t source_index);

struct CapOptions {
  // Proportional per-label allocation instead of a plain uniform draw.
  bool stratified = false;
};

// Returns the input unchanged when it fits under cap; otherwise a seeded
// sample of exactly cap instances without replacement, sorted by
// source_index.
std::vector<InstructionInstance> cap_task(std::vector<InstructionInstance> instances,
                                          std::size_t cap, std::uint64_t seed,
                                          const CapOptions& options = {});

struct TaskStats {
  std::map<Split, std::int64_t> counts;
  std::map<Split, std::map<std::string, std::int64_t>> label_histogram;

  bool operator==(const TaskStats&) const = default;
};

struct CorpusStats {
  std::map<std::string, TaskStats> tasks;
  std::int64_t total_train = 0;

  bool operator==(const CorpusStats&) const = default;
};

nlohmann::ordered_json to_json(const CorpusStats& stats);
CorpusStats corpus_stats_from_json(const nlohmann::json& j);

// task_id -> split -> raw file.
using RawSources = std::map<std::string, std::map<Split, std::filesystem::path>>;

// Finds <task_id>.<split>.raw.jsonl files in dir for the given tasks.
RawSources discover_raw_sources(const std::filesystem::path& dir,
                                const std::vector<std::string>& task_ids);

struct RecordError {
  std::filesystem::path file;
  std::int64_t line = 0;  // 1-based; 0 for file-level errors
  std::string message;
};

struct CompileOptions {
  std::uint64_t seed = 0;
  std::size_t max_errors = 0;
  CapOptions cap;
};

struct CompileResult {
  CorpusStats stats;
  std::vector<RecordError> errors;
  std::vector<std::filesystem::path> files_written;
};

class CompileError : public Error {
 public:
  CompileError(std::string what, std::vector<RecordError> errors)
      : Error(std::move(what)), errors_(std::move(errors)) {}
  const std::vector<RecordError>& errors() const { return errors_; }

 private:
  std::vector<RecordError> errors_;
};

// Reframes every raw file, caps the train split of capped tasks, and writes
// <task_id>.<split>.jsonl plus stats.json into out_dir. Nothing is written
// when the error count exceeds options.max_errors (throws CompileError).
CompileResult compile_corpus(const RawSources& sources, const std::filesystem::path& out_dir,
                             const CompileOptions& options,
                             const Registry& registry = Registry::builtin());

enum class ViolationKind {
  malformed_line,
  unknown_task,
  unknown_label,
  template_mismatch,
  unresolved_placeholder,
  file_mismatch,
  stats_mismatch,
  expected_count_mismatch,
  golden_template_mismatch,
};

std::string_view to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string file;
  std::int64_t line = 0;
  std::string task_id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> notes;
  std::size_t files_checked = 0;
  std::size_t instances_checked = 0;

  bool ok() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const;
};

struct ValidateOptions {
  // When set, each registry instruction must byte-match <dir>/<task_id>.txt.
  std::optional<std::filesystem::path> templates_dir;
  // Compare compiled counts with the registry's expected split sizes.
  bool check_expected_splits = false;
};

ValidationReport validate_corpus(const std::filesystem::path& corpus_dir,
                                 const ValidateOptions& options = {},
                                 const Registry& registry = Registry::builtin());

ValidationReport check_golden_templates(const std::filesystem::path& templates_dir,
                                        const Registry& registry = Registry::builtin());

// Human-readable notes on how compiled counts relate to the registry's
// expected splits, including capped tasks whose expected train count sits
// below the cap.
std::vector<std::string> reconcile_with_registry(const CorpusStats& stats,
                                                 const Registry& registry);

// Notes describing the tie convention of every threshold rule.
std::vector<std::string> tie_rule_notes(const Registry& registry);

}  // namespace socinstruct
