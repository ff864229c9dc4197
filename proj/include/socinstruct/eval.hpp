#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "socinstruct/config.hpp"
#include "socinstruct/gateway.hpp"
#include "socinstruct/report.hpp"

namespace socinstruct {

struct EvalHooks {
  // Used instead of the configured backend when set.
  CompletionBackend* backend = nullptr;
  // Interrupt the batch after this many completions (checkpoint kept).
  std::optional<std::size_t> stop_after;
};

struct EvalOutcome {
  std::filesystem::path run_dir;
  std::vector<Prompt> prompts;
  BatchResult batch;
  std::vector<ScoredPrediction> predictions;
  EvalReport report;
  // False when the batch was interrupted or the backend was unreachable on
  // every prompt; only the checkpoint is written then.
  bool scored = false;
};

// Builds prompts for every selected task from <corpus_dir>/<task>.<split>.jsonl.
// Few-shot exemplars come from the task's train split, else its validation
// split, else the evaluated split itself (the target is always excluded).
std::vector<Prompt> build_prompts(const RunConfig& cfg, const Registry& registry,
                                  nlohmann::ordered_json* pool_sources = nullptr);

// Maps a generation to a target-task label, going through the donor's
// vocabulary and the label map for cross-task prompts.
Prediction parse_generation(const Prompt& prompt, const Generation& generation,
                            const RunConfig& cfg, const Registry& registry,
                            std::size_t prompt_index);

// Runs the whole evaluation and writes, under runs/<run_id>/:
// generations.jsonl, predictions.jsonl, metrics.json, report.{md,csv,json}
// and prompts/<task>/<index>.txt. Resumes from generations.jsonl.
EvalOutcome run_eval(const RunConfig& cfg, const Registry& registry = Registry::builtin(),
                     const EvalHooks& hooks = {});

nlohmann::ordered_json metrics_json(const EvalReport& report);

}  // namespace socinstruct
