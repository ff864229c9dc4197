#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/registry.hpp"

namespace socinstruct {

struct FixtureOptions {
  std::uint64_t seed = 42;
  // Records per split = max(min_per_split, ceil(scale * published count)).
  double scale = 0.01;
  std::int64_t min_per_split = 20;
  // Extra raw train records, as a fraction, for capped tasks whose published
  // count sits at the cap, so the cap actually bites.
  double capped_surplus = 0.0;
  std::set<Split> splits{Split::train, Split::validation, Split::test};
  std::vector<std::string> tasks;  // empty = every registry task
};

struct FixtureTask {
  std::uint64_t generator_seed = 0;
  std::map<Split, std::int64_t> counts;           // raw records written
  std::map<Split, std::int64_t> compiled_counts;  // after the train cap
  std::map<Split, std::map<std::string, std::int64_t>> label_frequencies;

  bool operator==(const FixtureTask&) const = default;
};

struct FixtureManifest {
  std::uint64_t seed = 0;
  double scale = 0.0;
  std::map<std::string, FixtureTask> tasks;

  std::int64_t compiled_train_total() const;
  bool operator==(const FixtureManifest&) const = default;
};

nlohmann::ordered_json to_json(const FixtureManifest& m);
FixtureManifest fixture_manifest_from_json(const nlohmann::json& j);
FixtureManifest read_fixture_manifest(const std::filesystem::path& path);

// Writes <task>.<split>.raw.jsonl for each task and split plus manifest.json.
// Labels cycle through the label set; threshold tasks cycle scores around
// the threshold, one of them exactly on it. Deterministic in options.
FixtureManifest generate_fixtures(const std::filesystem::path& out_dir,
                                  const FixtureOptions& options = {},
                                  const Registry& registry = Registry::builtin());

// Scale 1.0 train-only fixtures whose compiled train counts equal the
// published ones.
FixtureOptions full_shape_options(std::uint64_t seed = 42);

// Directory of user-supplied raw files, from SOCINSTRUCT_REAL_RAW_DIR.
std::optional<std::filesystem::path> real_raw_dir();

}  // namespace socinstruct
