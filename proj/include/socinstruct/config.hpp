#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/gateway.hpp"
#include "socinstruct/label_parser.hpp"
#include "socinstruct/metrics.hpp"
#include "socinstruct/prompt.hpp"
#include "socinstruct/registry.hpp"

namespace socinstruct {

struct CompileConfig {
  std::optional<std::filesystem::path> raw_dir;
  // task_id -> split -> raw file; added on top of whatever raw_dir holds.
  std::map<std::string, std::map<Split, std::filesystem::path>> files;
  std::filesystem::path out_dir = "corpus";
  std::uint64_t seed = 0;
  std::size_t max_errors = 0;
  bool stratified_cap = false;
  bool check_expected_splits = false;
  std::optional<std::filesystem::path> templates_dir;
  std::vector<std::string> tasks{"all"};
};

struct ModeConfig {
  PromptMode mode;
  std::string separator = "\n\n";
  PoolKind pool = PoolKind::train_split;
  std::optional<std::filesystem::path> pool_file;  // provided_list exemplars
  // Donor label -> target label, cross-task only.
  std::map<std::string, std::string> label_map;
};

struct RunConfig {
  std::string run_id = "run";
  std::string system_name = "system";
  std::vector<std::string> tasks{"all"};
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "runs";
  std::filesystem::path corpus_dir = "corpus";
  Split split = Split::test;
  ParserStrictness parser_strictness = ParserStrictness::contained;
  bool dump_prompts = true;
  std::size_t checkpoint_every = 25;
  ModeConfig mode;
  BackendConfig backend;
  DecodingParams decoding;
  BootstrapOptions bootstrap;

  std::filesystem::path run_dir() const { return out_dir / run_id; }
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

struct AppConfig {
  CompileConfig compile;
  RunConfig run;
};

// Replaces ${NAME} with the environment variable NAME. Throws ConfigError
// when a referenced variable is unset.
std::string interpolate_env(const std::string& value);

// TOML with sections [compile], [run], [mode], [mode.label_map], [backend],
// [decoding], [bootstrap]. String values are env-interpolated; relative
// paths are taken relative to the config file. Throws ConfigError.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& toml_text,
                       const std::filesystem::path& base_dir = ".");

// Every donor label must be mapped, onto target labels only. Throws
// MissingLabelMap or UnknownLabel.
void check_label_map(const TaskSpec& target, const TaskSpec& donor,
                     const std::map<std::string, std::string>& label_map);

// Throws ConfigError on an inconsistent run configuration.
void check_run_config(const RunConfig& cfg, const Registry& registry = Registry::builtin());

}  // namespace socinstruct
