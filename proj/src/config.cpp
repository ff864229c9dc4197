#include "socinstruct/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "socinstruct/text.hpp"

namespace socinstruct {

namespace {

using nlohmann::json;

void interpolate_all(json& j) {
  if (j.is_string()) {
    j = interpolate_env(j.get<std::string>());
  } else if (j.is_structured()) {
    for (auto& child : j) interpolate_all(child);
  }
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

const json& section(const json& root, const char* name) {
  static const json empty = json::object();
  if (!root.contains(name)) return empty;
  if (!root[name].is_object()) throw ConfigError(fmt::format("[{}] must be a table", name));
  return root[name];
}

std::vector<std::string> string_list(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Split split_value(const std::string& s) {
  auto split = parse_split(s);
  if (!split) throw ConfigError("unknown split '" + s + "'");
  return *split;
}

CompileConfig parse_compile(const json& j, const std::filesystem::path& base) {
  CompileConfig c;
  if (j.contains("raw_dir")) c.raw_dir = resolve_path(base, j["raw_dir"].get<std::string>());
  if (j.contains("files")) {
    for (const auto& [task, splits] : j["files"].items()) {
      for (const auto& [split, path] : splits.items()) {
        c.files[task][split_value(split)] = resolve_path(base, path.get<std::string>());
      }
    }
  }
  c.out_dir = resolve_path(base, j.value("out_dir", std::string{"corpus"}));
  if (j.contains("templates_dir")) {
    c.templates_dir = resolve_path(base, j["templates_dir"].get<std::string>());
  }
  read_opt(j, "seed", c.seed);
  read_opt(j, "max_errors", c.max_errors);
  read_opt(j, "stratified_cap", c.stratified_cap);
  read_opt(j, "check_expected_splits", c.check_expected_splits);
  if (j.contains("tasks")) c.tasks = string_list(j, "tasks");
  return c;
}

ModeConfig parse_mode(const json& j, const std::filesystem::path& base) {
  ModeConfig m;
  const auto kind = j.value("kind", std::string{"zero_shot"});
  if (kind == "zero_shot") {
    m.mode = PromptMode::zero_shot();
  } else if (kind == "few_shot") {
    const auto k = j.value("k", std::int64_t{0});
    if (k < 0) throw ConfigError("mode.k must be >= 0");
    m.mode = PromptMode::few_shot(static_cast<std::size_t>(k));
  } else if (kind == "cross_task") {
    if (!j.contains("donor")) throw ConfigError("cross_task mode needs mode.donor");
    m.mode = PromptMode::cross_task(j["donor"].get<std::string>());
  } else {
    throw ConfigError("unknown mode kind '" + kind + "'");
  }
  read_opt(j, "separator", m.separator);
  const auto pool = j.value("pool", std::string{"train_split"});
  if (pool == "train_split") {
    m.pool = PoolKind::train_split;
  } else if (pool == "provided_list") {
    m.pool = PoolKind::provided_list;
  } else {
    throw ConfigError("unknown pool '" + pool + "'");
  }
  if (j.contains("pool_file")) m.pool_file = resolve_path(base, j["pool_file"].get<std::string>());
  if (j.contains("label_map")) {
    m.label_map = j["label_map"].get<std::map<std::string, std::string>>();
  }
  return m;
}

BackendConfig parse_backend(const json& j) {
  BackendConfig b;
  if (j.contains("kind")) {
    const auto kind = j["kind"].get<std::string>();
    auto parsed = parse_backend_kind(kind);
    if (!parsed) throw ConfigError("unknown backend kind '" + kind + "'");
    b.kind = *parsed;
  }
  if (j.contains("endpoint_url")) b.endpoint_url = j["endpoint_url"].get<std::string>();
  if (j.contains("model_name")) b.model_name = j["model_name"].get<std::string>();
  read_opt(j, "label", b.constant_label);
  read_opt(j, "p", b.noise_p);
  read_opt(j, "seed", b.noise_seed);
  read_opt(j, "timeout_ms", b.timeout_ms);
  read_opt(j, "max_retries", b.max_retries);
  read_opt(j, "max_in_flight", b.max_in_flight);
  if (j.contains("requests_per_second")) {
    b.requests_per_second = j["requests_per_second"].get<double>();
  }
  read_opt(j, "retry_backoff_ms", b.retry_backoff_ms);
  read_opt(j, "api_key_env", b.api_key_env);
  return b;
}

}  // namespace

std::string interpolate_env(const std::string& value) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = value.find("${", pos);
    if (open == std::string::npos) break;
    const auto close = value.find('}', open + 2);
    if (close == std::string::npos) break;
    const auto name = value.substr(open + 2, close - open - 2);
    const char* env = std::getenv(name.c_str());
    if (!env) throw ConfigError("environment variable '" + name + "' is not set");
    out += value.substr(pos, open - pos);
    out += env;
    pos = close + 1;
  }
  out += value.substr(pos);
  return out;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["run_id"] = cfg.run_id;
  j["system_name"] = cfg.system_name;
  j["tasks"] = cfg.tasks;
  j["seed"] = cfg.seed;
  j["corpus_dir"] = cfg.corpus_dir.string();
  j["split"] = to_string(cfg.split);
  j["parser_strictness"] = to_string(cfg.parser_strictness);
  j["mode"] = to_json(cfg.mode.mode);
  if (cfg.mode.mode.kind == PromptModeKind::few_shot) {
    j["mode"]["pool"] = cfg.mode.pool == PoolKind::train_split ? "train_split" : "provided_list";
    j["mode"]["separator"] = cfg.mode.separator;
    if (cfg.mode.pool_file) j["mode"]["pool_file"] = cfg.mode.pool_file->string();
  }
  if (cfg.mode.mode.kind == PromptModeKind::cross_task) j["mode"]["label_map"] = cfg.mode.label_map;
  j["backend"] = to_json(cfg.backend);
  j["decoding"] = to_json(cfg.decoding);
  j["bootstrap"] = {{"resamples", cfg.bootstrap.resamples},
                    {"seed", cfg.bootstrap.seed},
                    {"two_sided", cfg.bootstrap.two_sided}};
  return j;
}

AppConfig parse_config(const std::string& toml_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    auto table = toml::parse(toml_text);
    std::stringstream ss;
    ss << toml::json_formatter{table};
    root = json::parse(ss.str());
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("config parse error: {}", e.description()));
  }
  interpolate_all(root);

  AppConfig app;
  try {
    app.compile = parse_compile(section(root, "compile"), base_dir);

    const auto& run = section(root, "run");
    RunConfig& r = app.run;
    read_opt(run, "run_id", r.run_id);
    read_opt(run, "system_name", r.system_name);
    if (run.contains("tasks")) r.tasks = string_list(run, "tasks");
    read_opt(run, "seed", r.seed);
    r.out_dir = resolve_path(base_dir, run.value("out_dir", std::string{"runs"}));
    if (run.contains("corpus_dir")) {
      r.corpus_dir = resolve_path(base_dir, run["corpus_dir"].get<std::string>());
    } else {
      r.corpus_dir = app.compile.out_dir;
    }
    if (run.contains("split")) r.split = split_value(run["split"].get<std::string>());
    if (run.contains("parser_strictness")) {
      const auto s = run["parser_strictness"].get<std::string>();
      auto parsed = parse_strictness(s);
      if (!parsed) throw ConfigError("unknown parser_strictness '" + s + "'");
      r.parser_strictness = *parsed;
    }
    read_opt(run, "dump_prompts", r.dump_prompts);
    read_opt(run, "checkpoint_every", r.checkpoint_every);

    r.mode = parse_mode(section(root, "mode"), base_dir);
    r.backend = parse_backend(section(root, "backend"));

    const auto& decoding = section(root, "decoding");
    read_opt(decoding, "max_tokens", r.decoding.max_tokens);
    read_opt(decoding, "temperature", r.decoding.temperature);
    if (decoding.contains("stop")) r.decoding.stop = string_list(decoding, "stop");

    const auto& boot = section(root, "bootstrap");
    read_opt(boot, "resamples", r.bootstrap.resamples);
    r.bootstrap.seed = r.seed;
    read_opt(boot, "seed", r.bootstrap.seed);
    read_opt(boot, "two_sided", r.bootstrap.two_sided);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config value error: {}", e.what()));
  }
  return app;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base);
}

void check_label_map(const TaskSpec& target, const TaskSpec& donor,
                     const std::map<std::string, std::string>& label_map) {
  std::vector<std::string> missing;
  for (const auto& label : donor.label_set) {
    if (!label_map.count(label)) missing.push_back(label);
  }
  if (!missing.empty()) {
    throw MissingLabelMap(fmt::format("label map from {} to {} lacks donor labels: {}",
                                      donor.task_id, target.task_id, join(missing, ", ")));
  }
  for (const auto& [from, to] : label_map) {
    if (!match_canonical_label(donor, from) || *match_canonical_label(donor, from) != from) {
      throw UnknownLabel(fmt::format("label map key '{}' is not a {} label", from, donor.task_id));
    }
    if (std::find(target.label_set.begin(), target.label_set.end(), to) ==
        target.label_set.end()) {
      throw UnknownLabel(fmt::format("label map value '{}' is not a {} label", to, target.task_id));
    }
  }
}

void check_run_config(const RunConfig& cfg, const Registry& registry) {
  if (cfg.run_id.empty() || cfg.run_id.find('/') != std::string::npos) {
    throw ConfigError("run_id must be a non-empty name without '/'");
  }
  registry.resolve(cfg.tasks);
  cfg.backend.validate();
  if (cfg.bootstrap.resamples < 1000) throw ConfigError("bootstrap.resamples must be >= 1000");
  if (cfg.mode.mode.kind == PromptModeKind::few_shot && cfg.mode.pool == PoolKind::provided_list &&
      !cfg.mode.pool_file) {
    throw ConfigError("provided_list pool needs mode.pool_file");
  }
  if (cfg.mode.mode.kind == PromptModeKind::cross_task) {
    const auto& donor = registry.get(cfg.mode.mode.donor_id);
    for (const auto& id : registry.resolve(cfg.tasks)) {
      if (id != donor.task_id) check_label_map(registry.get(id), donor, cfg.mode.label_map);
    }
  }
}

}  // namespace socinstruct
