#include "socinstruct/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "socinstruct/rng.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace fs = std::filesystem;

namespace {

Split split_from_json(const nlohmann::json& j) {
  auto split = parse_split(j.get<std::string>());
  if (!split) throw Error("unknown split '" + j.get<std::string>() + "'");
  return *split;
}

std::string instance_file_name(const std::string& task_id, Split split) {
  return fmt::format("{}.{}.jsonl", task_id, to_string(split));
}

// Splits "<task>.<split>.jsonl" into its parts.
std::optional<std::pair<std::string, Split>> parse_instance_file_name(const std::string& name) {
  constexpr std::string_view kExt = ".jsonl";
  if (name.size() <= kExt.size() || name.substr(name.size() - kExt.size()) != kExt) {
    return std::nullopt;
  }
  std::string stem = name.substr(0, name.size() - kExt.size());
  auto dot = stem.rfind('.');
  if (dot == std::string::npos) return std::nullopt;
  auto split = parse_split(stem.substr(dot + 1));
  if (!split) return std::nullopt;
  return std::make_pair(stem.substr(0, dot), *split);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << data;
}

struct TaskOutput {
  std::string task_id;
  std::map<Split, std::vector<InstructionInstance>> splits;
  std::vector<RecordError> errors;
};

TaskOutput compile_task(const TaskSpec& task, const std::map<Split, fs::path>& files,
                        const CompileOptions& options) {
  TaskOutput out;
  out.task_id = task.task_id;
  for (const auto& [split, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      out.errors.push_back({path, 0, "cannot open file"});
      continue;
    }
    auto& instances = out.splits[split];
    std::string line;
    std::int64_t lineno = 0;
    std::int64_t source_index = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        RawRecord raw = raw_record_from_json(nlohmann::json::parse(line));
        if (raw.task_id != task.task_id || raw.split != split) {
          throw Error(fmt::format("record belongs to {}.{}", raw.task_id, to_string(raw.split)));
        }
        instances.push_back(reframe_record(task, raw, source_index));
      } catch (const std::exception& e) {
        out.errors.push_back({path, lineno, e.what()});
      }
      ++source_index;
    }
  }
  if (task.cap) {
    if (auto it = out.splits.find(Split::train); it != out.splits.end()) {
      it->second = cap_task(std::move(it->second), static_cast<std::size_t>(*task.cap),
                            mix_seed(options.seed, fnv1a64(task.task_id)), options.cap);
    }
  }
  return out;
}

}  // namespace

nlohmann::ordered_json to_json(const RawRecord& r) {
  nlohmann::ordered_json j;
  j["task_id"] = r.task_id;
  j["split"] = to_string(r.split);
  j["fields"] = r.fields;
  if (r.score) j["score"] = *r.score;
  if (r.label) j["label"] = *r.label;
  return j;
}

RawRecord raw_record_from_json(const nlohmann::json& j) {
  RawRecord r;
  r.task_id = j.at("task_id").get<std::string>();
  r.split = split_from_json(j.at("split"));
  r.fields = j.at("fields").get<std::map<std::string, std::string>>();
  if (j.contains("score") && !j.at("score").is_null()) r.score = j.at("score").get<double>();
  if (j.contains("label") && !j.at("label").is_null()) r.label = j.at("label").get<std::string>();
  return r;
}

nlohmann::ordered_json to_json(const InstructionInstance& inst) {
  nlohmann::ordered_json j;
  j["task_id"] = inst.task_id;
  j["split"] = to_string(inst.split);
  j["instruction"] = inst.instruction;
  j["input"] = inst.input;
  j["gold"] = inst.gold;
  j["source_index"] = inst.source_index;
  return j;
}

InstructionInstance instance_from_json(const nlohmann::json& j) {
  InstructionInstance inst;
  inst.task_id = j.at("task_id").get<std::string>();
  inst.split = split_from_json(j.at("split"));
  inst.instruction = j.at("instruction").get<std::string>();
  inst.input = j.at("input").get<std::string>();
  inst.gold = j.at("gold").get<std::string>();
  inst.source_index = j.at("source_index").get<std::int64_t>();
  return inst;
}

std::vector<InstructionInstance> read_instances(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<InstructionInstance> out;
  std::string line;
  std::int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(instance_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return out;
}

void write_instances(const fs::path& path, const std::vector<InstructionInstance>& instances) {
  std::string data;
  for (const auto& inst : instances) {
    data += to_json(inst).dump();
    data += '\n';
  }
  write_file(path, data);
}

std::string binarize_score(const ThresholdRule& rule, double score) {
  if (!std::isfinite(score)) {
    throw InvalidScore(fmt::format("score {} is not finite", score));
  }
  if (score > rule.threshold) return rule.above_label;
  if (score < rule.threshold) return rule.below_label;
  return rule.tie_label;
}

InstructionInstance reframe_record(const TaskSpec& task, const RawRecord& raw,
                                   std::int64_t source_index) {
  if (raw.task_id != task.task_id) {
    throw Error(fmt::format("record for '{}' given to task '{}'", raw.task_id, task.task_id));
  }
  InstructionInstance inst;
  inst.task_id = task.task_id;
  inst.split = raw.split;
  inst.instruction = task.instruction_text;
  inst.input = render_template(task.input_template, raw.fields);
  inst.source_index = source_index;

  if (task.reframing) {
    if (!raw.score) throw InvalidScore(task.task_id + " record has no score");
    inst.gold = binarize_score(*task.reframing, *raw.score);
  } else {
    if (!raw.label) throw UnknownLabel(task.task_id + " record has no label");
    auto canonical = match_canonical_label(task, *raw.label);
    if (!canonical) {
      throw UnknownLabel(fmt::format("'{}' is not a {} label", *raw.label, task.task_id));
    }
    inst.gold = *canonical;
  }
  return inst;
}

std::vector<InstructionInstance> cap_task(std::vector<InstructionInstance> instances,
                                          std::size_t cap, std::uint64_t seed,
                                          const CapOptions& options) {
  if (instances.size() <= cap) return instances;

  auto sample = [](std::vector<std::size_t>& pool, std::size_t take, Rng& rng) {
    // Partial Fisher-Yates; the first `take` slots hold the sample.
    for (std::size_t i = 0; i < take; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(take);
  };

  std::vector<std::size_t> chosen;
  if (!options.stratified) {
    chosen.resize(instances.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    Rng rng(seed);
    sample(chosen, cap, rng);
  } else {
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < instances.size(); ++i) groups[instances[i].gold].push_back(i);

    // Largest-remainder allocation of the cap across labels.
    const double total = static_cast<double>(instances.size());
    std::vector<std::pair<double, std::string>> remainders;
    std::map<std::string, std::size_t> quota;
    std::size_t assigned = 0;
    for (const auto& [label, members] : groups) {
      double exact = static_cast<double>(cap) * static_cast<double>(members.size()) / total;
      quota[label] = static_cast<std::size_t>(std::floor(exact));
      assigned += quota[label];
      remainders.emplace_back(exact - std::floor(exact), label);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < cap; ++i, ++assigned) {
      ++quota[remainders[i % remainders.size()].second];
    }
    std::uint64_t stream = 0;
    for (auto& [label, members] : groups) {
      Rng rng(mix_seed(seed, stream++));
      sample(members, std::min(quota[label], members.size()), rng);
      chosen.insert(chosen.end(), members.begin(), members.end());
    }
  }

  std::vector<InstructionInstance> out;
  out.reserve(chosen.size());
  for (std::size_t i : chosen) out.push_back(std::move(instances[i]));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.source_index < b.source_index;
  });
  return out;
}

nlohmann::ordered_json to_json(const CorpusStats& stats) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json tasks = nlohmann::ordered_json::object();
  for (const auto& [task_id, ts] : stats.tasks) {
    nlohmann::ordered_json entry;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [split, n] : ts.counts) counts[std::string(to_string(split))] = n;
    for (const auto& [split, labels] : ts.label_histogram) {
      nlohmann::ordered_json h = nlohmann::ordered_json::object();
      for (const auto& [label, n] : labels) h[label] = n;
      hist[std::string(to_string(split))] = h;
    }
    entry["counts"] = counts;
    entry["label_histogram"] = hist;
    tasks[task_id] = entry;
  }
  j["tasks"] = tasks;
  j["total_train"] = stats.total_train;
  return j;
}

CorpusStats corpus_stats_from_json(const nlohmann::json& j) {
  CorpusStats stats;
  for (const auto& [task_id, entry] : j.at("tasks").items()) {
    TaskStats ts;
    for (const auto& [split, n] : entry.at("counts").items()) {
      ts.counts[*parse_split(split)] = n.get<std::int64_t>();
    }
    for (const auto& [split, labels] : entry.at("label_histogram").items()) {
      ts.label_histogram[*parse_split(split)] =
          labels.get<std::map<std::string, std::int64_t>>();
    }
    stats.tasks[task_id] = std::move(ts);
  }
  stats.total_train = j.at("total_train").get<std::int64_t>();
  return stats;
}

RawSources discover_raw_sources(const fs::path& dir, const std::vector<std::string>& task_ids) {
  RawSources sources;
  for (const auto& task_id : task_ids) {
    for (Split split : kAllSplits) {
      fs::path p = dir / fmt::format("{}.{}.raw.jsonl", task_id, to_string(split));
      if (fs::exists(p)) sources[task_id][split] = p;
    }
  }
  return sources;
}

CompileResult compile_corpus(const RawSources& sources, const fs::path& out_dir,
                             const CompileOptions& options, const Registry& registry) {
  std::vector<const TaskSpec*> tasks;
  for (const auto& [task_id, files] : sources) tasks.push_back(&registry.get(task_id));

  // Tasks are independent; each future yields a deterministic TaskOutput.
  std::vector<std::future<TaskOutput>> futures;
  for (const TaskSpec* task : tasks) {
    futures.push_back(std::async(std::launch::async, compile_task, std::cref(*task),
                                 std::cref(sources.at(task->task_id)), std::cref(options)));
  }

  CompileResult result;
  std::vector<TaskOutput> outputs;
  for (auto& f : futures) {
    outputs.push_back(f.get());
    auto& errs = outputs.back().errors;
    result.errors.insert(result.errors.end(), errs.begin(), errs.end());
  }
  if (result.errors.size() > options.max_errors) {
    throw CompileError(fmt::format("{} record error(s), budget is {}", result.errors.size(),
                                   options.max_errors),
                       result.errors);
  }

  for (const auto& out : outputs) {
    TaskStats& ts = result.stats.tasks[out.task_id];
    for (const auto& [split, instances] : out.splits) {
      ts.counts[split] = static_cast<std::int64_t>(instances.size());
      auto& hist = ts.label_histogram[split];
      for (const auto& inst : instances) ++hist[inst.gold];
      if (split == Split::train) result.stats.total_train += ts.counts[split];
    }
  }
  if (outputs.empty()) return result;

  fs::create_directories(out_dir);
  for (const auto& out : outputs) {
    for (const auto& [split, instances] : out.splits) {
      fs::path p = out_dir / instance_file_name(out.task_id, split);
      write_instances(p, instances);
      result.files_written.push_back(p);
    }
  }
  fs::path stats_path = out_dir / "stats.json";
  write_file(stats_path, to_json(result.stats).dump(2) + "\n");
  result.files_written.push_back(stats_path);
  return result;
}

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::malformed_line: return "MalformedLine";
    case ViolationKind::unknown_task: return "UnknownTask";
    case ViolationKind::unknown_label: return "UnknownLabel";
    case ViolationKind::template_mismatch: return "TemplateMismatch";
    case ViolationKind::unresolved_placeholder: return "UnresolvedPlaceholder";
    case ViolationKind::file_mismatch: return "FileMismatch";
    case ViolationKind::stats_mismatch: return "StatsMismatch";
    case ViolationKind::expected_count_mismatch: return "ExpectedCountMismatch";
    case ViolationKind::golden_template_mismatch: return "GoldenTemplateMismatch";
  }
  return "Unknown";
}

std::size_t ValidationReport::count(ViolationKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [kind](const auto& v) { return v.kind == kind; }));
}

ValidationReport check_golden_templates(const fs::path& templates_dir, const Registry& registry) {
  ValidationReport report;
  for (const auto& task : registry.list()) {
    fs::path p = templates_dir / (task.task_id + ".txt");
    ++report.files_checked;
    std::string golden;
    try {
      golden = read_file(p);
    } catch (const Error&) {
      report.violations.push_back({ViolationKind::golden_template_mismatch, p.string(), 0,
                                   task.task_id, "golden template file missing"});
      continue;
    }
    if (golden != task.instruction_text) {
      auto diff = std::mismatch(golden.begin(), golden.end(), task.instruction_text.begin(),
                                task.instruction_text.end());
      report.violations.push_back(
          {ViolationKind::golden_template_mismatch, p.string(), 0, task.task_id,
           fmt::format("{} differs from the registry instruction at byte {}", task.task_id,
                       std::distance(golden.begin(), diff.first))});
    }
  }
  return report;
}

ValidationReport validate_corpus(const fs::path& corpus_dir, const ValidateOptions& options,
                                 const Registry& registry) {
  ValidationReport report;
  auto violate = [&](ViolationKind kind, const fs::path& file, std::int64_t line,
                     std::string task_id, std::string message) {
    report.violations.push_back(
        {kind, file.string(), line, std::move(task_id), std::move(message)});
  };

  std::vector<fs::path> files;
  if (fs::is_directory(corpus_dir)) {
    for (const auto& entry : fs::directory_iterator(corpus_dir)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".jsonl") && !name.ends_with(".raw.jsonl")) {
        files.push_back(entry.path());
      }
    }
  } else {
    violate(ViolationKind::malformed_line, corpus_dir, 0, "", "corpus directory not found");
  }
  std::sort(files.begin(), files.end());

  static const std::vector<std::string> kKeyOrder = {"task_id", "split", "instruction",
                                                     "input",   "gold",  "source_index"};
  std::map<std::string, std::map<Split, std::int64_t>> counts;

  for (const auto& path : files) {
    ++report.files_checked;
    auto identity = parse_instance_file_name(path.filename().string());
    if (!identity) {
      violate(ViolationKind::file_mismatch, path, 0, "", "file name is not <task>.<split>.jsonl");
      continue;
    }
    const auto& [file_task, file_split] = *identity;
    const TaskSpec* task = registry.contains(file_task) ? &registry.get(file_task) : nullptr;
    if (!task) {
      violate(ViolationKind::unknown_task, path, 0, file_task, "task not in registry");
      continue;
    }
    const auto placeholders = template_placeholders(task->input_template);
    auto& count = counts[file_task][file_split];

    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      InstructionInstance inst;
      try {
        auto j = nlohmann::ordered_json::parse(line);
        std::vector<std::string> keys;
        for (const auto& item : j.items()) keys.push_back(item.key());
        if (keys != kKeyOrder) throw Error("keys out of order or missing");
        inst = instance_from_json(j);
      } catch (const std::exception& e) {
        violate(ViolationKind::malformed_line, path, lineno, file_task, e.what());
        continue;
      }
      ++report.instances_checked;
      ++count;
      if (inst.task_id != file_task || inst.split != file_split) {
        violate(ViolationKind::file_mismatch, path, lineno, inst.task_id,
                fmt::format("instance {}.{} stored in {}", inst.task_id, to_string(inst.split),
                            path.filename().string()));
      }
      if (inst.instruction != task->instruction_text) {
        violate(ViolationKind::template_mismatch, path, lineno, file_task,
                fmt::format("instruction differs from the {} template", file_task));
      }
      if (std::find(task->label_set.begin(), task->label_set.end(), inst.gold) ==
          task->label_set.end()) {
        violate(ViolationKind::unknown_label, path, lineno, file_task,
                fmt::format("gold '{}' is not a {} label", inst.gold, file_task));
      }
      for (const auto& name : placeholders) {
        if (inst.input.find("{" + name + "}") != std::string::npos) {
          violate(ViolationKind::unresolved_placeholder, path, lineno, file_task,
                  fmt::format("input still contains {{{}}}", name));
        }
      }
    }
  }

  const fs::path stats_path = corpus_dir / "stats.json";
  if (fs::exists(stats_path)) {
    try {
      CorpusStats stats = corpus_stats_from_json(nlohmann::json::parse(read_file(stats_path)));
      std::int64_t train_total = 0;
      for (const auto& [task_id, ts] : stats.tasks) {
        for (const auto& [split, n] : ts.counts) {
          std::int64_t actual = 0;
          if (auto t = counts.find(task_id); t != counts.end()) {
            if (auto s = t->second.find(split); s != t->second.end()) actual = s->second;
          }
          if (actual != n) {
            violate(ViolationKind::stats_mismatch, stats_path, 0, task_id,
                    fmt::format("stats.json lists {} {} instances, files hold {}", n,
                                to_string(split), actual));
          }
          if (split == Split::train) train_total += n;
        }
      }
      if (train_total != stats.total_train) {
        violate(ViolationKind::stats_mismatch, stats_path, 0, "",
                fmt::format("total_train {} != sum of train counts {}", stats.total_train,
                            train_total));
      }
    } catch (const std::exception& e) {
      violate(ViolationKind::malformed_line, stats_path, 0, "", e.what());
    }
  }

  if (options.check_expected_splits) {
    for (const auto& [task_id, splits] : counts) {
      const TaskSpec& task = registry.get(task_id);
      for (const auto& [split, actual] : splits) {
        auto it = task.expected_splits.find(split);
        if (it == task.expected_splits.end() || it->second == actual) continue;
        std::string msg = fmt::format("{} {}: {} instances, registry expects {}", task_id,
                                      to_string(split), actual, it->second);
        if (task.cap && split == Split::train && actual == *task.cap && it->second < *task.cap) {
          msg += fmt::format(" (cap {} reached; registry value sits below the cap)", *task.cap);
        }
        violate(ViolationKind::expected_count_mismatch, corpus_dir, 0, task_id, msg);
      }
    }
  }

  if (options.templates_dir) {
    auto golden = check_golden_templates(*options.templates_dir, registry);
    report.violations.insert(report.violations.end(), golden.violations.begin(),
                             golden.violations.end());
    report.files_checked += golden.files_checked;
  }
  report.notes = tie_rule_notes(registry);
  return report;
}

std::vector<std::string> reconcile_with_registry(const CorpusStats& stats,
                                                 const Registry& registry) {
  std::vector<std::string> notes;
  for (const auto& [task_id, ts] : stats.tasks) {
    if (!registry.contains(task_id)) continue;
    const TaskSpec& task = registry.get(task_id);
    for (const auto& [split, expected] : task.expected_splits) {
      auto it = ts.counts.find(split);
      if (it == ts.counts.end() || it->second == expected) continue;
      notes.push_back(fmt::format("{} {}: compiled {}, registry expects {}", task_id,
                                  to_string(split), it->second, expected));
    }
    if (task.cap) {
      auto expected = task.expected_splits.find(Split::train);
      if (expected != task.expected_splits.end() && expected->second < *task.cap) {
        auto compiled = ts.counts.find(Split::train);
        notes.push_back(fmt::format(
            "{}: registry lists {} train examples although the cap is {}; the cap is applied "
            "as an upper bound (compiled {})",
            task_id, expected->second, *task.cap,
            compiled == ts.counts.end() ? 0 : compiled->second));
      }
    }
  }
  return notes;
}

std::vector<std::string> tie_rule_notes(const Registry& registry) {
  std::vector<std::string> notes;
  for (const auto& task : registry.list()) {
    if (!task.reframing) continue;
    const auto& r = *task.reframing;
    notes.push_back(fmt::format(
        "{}: score > {} -> '{}', score < {} -> '{}', score == {} -> '{}' (tie convention)",
        task.task_id, r.threshold, r.above_label, r.threshold, r.below_label, r.threshold,
        r.tie_label));
  }
  return notes;
}

}  // namespace socinstruct
