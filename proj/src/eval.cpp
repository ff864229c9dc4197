#include "socinstruct/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "socinstruct/metrics.hpp"

namespace socinstruct {

namespace fs = std::filesystem;

namespace {

fs::path split_file(const fs::path& corpus_dir, const std::string& task_id, Split split) {
  return corpus_dir / fmt::format("{}.{}.jsonl", task_id, to_string(split));
}

std::vector<InstructionInstance> load_split(const fs::path& corpus_dir,
                                            const std::string& task_id, Split split) {
  const auto path = split_file(corpus_dir, task_id, split);
  if (!fs::exists(path)) {
    throw Error(fmt::format("compiled split not found: {} (run compile first)", path.string()));
  }
  return read_instances(path);
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

// Donor label a perfect model would emit for a target gold label.
std::string donor_label_for(const TaskSpec& donor, const std::map<std::string, std::string>& map,
                            const std::string& gold) {
  for (const auto& label : donor.label_set) {
    if (auto it = map.find(label); it != map.end() && it->second == gold) return label;
  }
  return gold;
}

std::vector<InstructionInstance> few_shot_pool(const RunConfig& cfg, const std::string& task_id,
                                               const std::vector<InstructionInstance>& evaluated,
                                               std::string& source) {
  if (cfg.mode.pool == PoolKind::provided_list) {
    std::vector<InstructionInstance> pool;
    for (auto& inst : read_instances(*cfg.mode.pool_file)) {
      if (inst.task_id == task_id) pool.push_back(std::move(inst));
    }
    source = cfg.mode.pool_file->string();
    return pool;
  }
  for (Split s : {Split::train, Split::validation}) {
    if (s == cfg.split) continue;
    if (fs::exists(split_file(cfg.corpus_dir, task_id, s))) {
      source = std::string(to_string(s));
      return load_split(cfg.corpus_dir, task_id, s);
    }
  }
  source = std::string(to_string(cfg.split));
  return evaluated;
}

}  // namespace

std::vector<Prompt> build_prompts(const RunConfig& cfg, const Registry& registry,
                                  nlohmann::ordered_json* pool_sources) {
  std::vector<Prompt> prompts;
  const TaskSpec* donor = cfg.mode.mode.kind == PromptModeKind::cross_task
                              ? &registry.get(cfg.mode.mode.donor_id)
                              : nullptr;
  for (const auto& task_id : registry.resolve(cfg.tasks)) {
    const auto instances = load_split(cfg.corpus_dir, task_id, cfg.split);
    switch (cfg.mode.mode.kind) {
      case PromptModeKind::zero_shot:
        for (const auto& inst : instances) prompts.push_back(build_zero_shot(inst));
        break;
      case PromptModeKind::few_shot: {
        std::string source;
        const auto pool = cfg.mode.mode.k == 0 ? std::vector<InstructionInstance>{}
                                               : few_shot_pool(cfg, task_id, instances, source);
        if (pool_sources && !source.empty()) (*pool_sources)[task_id] = source;
        FewShotPolicy policy{cfg.mode.mode.k, cfg.mode.pool, cfg.seed, cfg.mode.separator};
        for (const auto& inst : instances) prompts.push_back(build_few_shot(inst, policy, pool));
        break;
      }
      case PromptModeKind::cross_task:
        for (const auto& inst : instances) {
          auto p = build_cross_task(inst, *donor);
          if (donor->task_id != task_id) {
            p.expected_output = donor_label_for(*donor, cfg.mode.label_map, inst.gold);
          }
          prompts.push_back(std::move(p));
        }
        break;
    }
  }
  for (auto& p : prompts) p.decoding = cfg.decoding;
  return prompts;
}

Prediction parse_generation(const Prompt& prompt, const Generation& generation,
                            const RunConfig& cfg, const Registry& registry,
                            std::size_t prompt_index) {
  const bool cross = prompt.mode.kind == PromptModeKind::cross_task &&
                     prompt.mode.donor_id != prompt.task_id;
  const auto& vocab = registry.get(cross ? prompt.mode.donor_id : prompt.task_id);
  auto pred = parse_label(vocab, generation.raw_text.value_or(""), cfg.parser_strictness,
                          prompt_index);
  pred.task_id = prompt.task_id;
  if (cross && pred.parsed) {
    auto it = cfg.mode.label_map.find(*pred.parsed);
    if (it == cfg.mode.label_map.end()) {
      throw MissingLabelMap(fmt::format("no mapping for donor label '{}'", *pred.parsed));
    }
    pred.parsed = it->second;
  }
  return pred;
}

nlohmann::ordered_json metrics_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["run_id"] = report.run_id;
  j["tasks"] = nlohmann::ordered_json::object();
  for (const auto& t : report.tasks) {
    nlohmann::ordered_json tj;
    tj["macro_f1"] = t.macro_f1;
    tj["n"] = t.n;
    tj["invalid_rate"] = t.invalid_rate;
    tj["accuracy"] = t.accuracy;
    tj["confusion"] = to_json(t.confusion);
    j["tasks"][t.task_id] = std::move(tj);
  }
  return j;
}

EvalOutcome run_eval(const RunConfig& cfg, const Registry& registry, const EvalHooks& hooks) {
  check_run_config(cfg, registry);

  EvalOutcome outcome;
  outcome.run_dir = cfg.run_dir();
  fs::create_directories(outcome.run_dir);

  nlohmann::ordered_json pool_sources = nlohmann::ordered_json::object();
  outcome.prompts = build_prompts(cfg, registry, &pool_sources);
  if (outcome.prompts.empty()) throw Error("no instances to evaluate");

  if (cfg.dump_prompts) {
    for (const auto& p : outcome.prompts) {
      write_text(outcome.run_dir / "prompts" / p.task_id /
                     fmt::format("{}.txt", p.target_source_index),
                 p.text);
    }
  }

  std::unique_ptr<CompletionBackend> owned;
  CompletionBackend* backend = hooks.backend;
  if (!backend) {
    owned = make_backend(cfg.backend, registry);
    backend = owned.get();
  }
  BatchOptions batch_options;
  batch_options.checkpoint_path = outcome.run_dir / "generations.jsonl";
  batch_options.checkpoint_every = cfg.checkpoint_every;
  batch_options.stop_after = hooks.stop_after;
  outcome.batch = run_batch(outcome.prompts, *backend, cfg.backend, batch_options);

  const bool all_unreachable =
      std::all_of(outcome.batch.generations.begin(), outcome.batch.generations.end(),
                  [](const Generation& g) { return g.error_kind == GenerationError::unreachable; });
  if (!outcome.batch.complete || all_unreachable) return outcome;

  std::map<std::string, std::vector<std::string>> golds;
  std::map<std::string, std::vector<std::optional<std::string>>> preds;
  std::map<std::string, std::vector<InstructionInstance>> by_task;
  for (const auto& task_id : registry.resolve(cfg.tasks)) {
    by_task[task_id] = load_split(cfg.corpus_dir, task_id, cfg.split);
  }

  // Prompts follow instance order within a task; gold comes from the
  // instance since cross-task prompts expect donor vocabulary.
  std::map<std::string, std::size_t> cursor;
  for (std::size_t i = 0; i < outcome.prompts.size(); ++i) {
    const auto& prompt = outcome.prompts[i];
    const auto& gen = outcome.batch.generations[i];
    const auto& inst = by_task.at(prompt.task_id).at(cursor[prompt.task_id]++);

    ScoredPrediction sp;
    sp.prediction = parse_generation(prompt, gen, cfg, registry, i);
    sp.gold = inst.gold;
    sp.target_source_index = prompt.target_source_index;
    sp.backend_error = gen.backend_error;
    golds[prompt.task_id].push_back(sp.gold);
    preds[prompt.task_id].push_back(sp.prediction.parsed);
    outcome.predictions.push_back(std::move(sp));
  }

  EvalReport& report = outcome.report;
  report.run_id = cfg.run_id;
  report.system_name = cfg.system_name;
  report.mode = cfg.mode.mode;
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  for (const auto& task_id : registry.resolve(cfg.tasks)) {
    const auto& task = registry.get(task_id);
    report.tasks.push_back(
        score_task(task_id, confusion(golds[task_id], preds[task_id], task.label_set, task_id)));
    hashes[task_id] = template_hash(task);
  }
  if (cfg.mode.mode.kind == PromptModeKind::cross_task) {
    hashes[cfg.mode.mode.donor_id] = template_hash(registry.get(cfg.mode.mode.donor_id));
  }

  report.manifest["config"] = to_json(cfg);
  report.manifest["template_hashes"] = hashes;
  if (!pool_sources.empty()) report.manifest["few_shot_pool"] = pool_sources;
  report.manifest["prompts"] = outcome.prompts.size();
  report.manifest["backend_errors"] = outcome.batch.error_count;

  write_predictions(outcome.run_dir / "predictions.jsonl", outcome.predictions);
  write_text(outcome.run_dir / "metrics.json", metrics_json(report).dump(2) + "\n");
  write_text(outcome.run_dir / "report.json", to_json(report).dump(2) + "\n");
  const std::vector<EvalReport> one{report};
  write_text(outcome.run_dir / "report.md", render_results(one, ReportFormat::markdown, registry));
  write_text(outcome.run_dir / "report.csv", render_results(one, ReportFormat::csv, registry));
  outcome.scored = true;
  return outcome;
}

}  // namespace socinstruct
