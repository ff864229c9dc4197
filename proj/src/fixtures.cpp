#include "socinstruct/fixtures.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <fmt/format.h>

#include "socinstruct/corpus.hpp"
#include "socinstruct/rng.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace {

constexpr const char* kWords[] = {
    "amber",  "river",   "quietly", "lantern", "seven",   "market", "paper",  "slow",
    "window", "orbit",   "garden",  "velvet",  "thunder", "copper", "maybe",  "north",
    "pillow", "echo",    "harbor",  "crisp",   "meadow",  "tiny",   "signal", "marble",
    "hollow", "bright",  "ladder",  "cotton",  "drift",   "ember",  "folder", "gentle",
    "island", "juniper", "kettle",  "lemon",   "morning", "nickel", "oak",    "puzzle",
};
constexpr std::size_t kWordCount = sizeof(kWords) / sizeof(kWords[0]);

// Offsets from the threshold, cycled; the zero entry is the tie case.
constexpr double kScoreOffsets[] = {-1.5, 0.0, 0.4, 1.2, -0.6};

std::string word_salad(Rng& rng) {
  const auto len = 6 + rng.below(9);
  std::string out;
  for (std::uint64_t i = 0; i < len; ++i) {
    if (i) out += ' ';
    out += kWords[rng.below(kWordCount)];
  }
  if (rng.below(4) == 0) out += '.';
  return out;
}

std::int64_t fixture_count(std::int64_t published, const FixtureOptions& options) {
  const auto scaled = static_cast<std::int64_t>(std::ceil(options.scale * static_cast<double>(published) - 1e-9));
  return std::max(options.min_per_split, scaled);
}

nlohmann::ordered_json split_map_json(const std::map<Split, std::int64_t>& m) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [split, n] : m) j[std::string(to_string(split))] = n;
  return j;
}

std::map<Split, std::int64_t> split_map_from_json(const nlohmann::json& j) {
  std::map<Split, std::int64_t> out;
  for (const auto& [key, value] : j.items()) {
    auto split = parse_split(key);
    if (!split) throw Error("unknown split '" + key + "' in fixture manifest");
    out[*split] = value.get<std::int64_t>();
  }
  return out;
}

}  // namespace

std::int64_t FixtureManifest::compiled_train_total() const {
  std::int64_t total = 0;
  for (const auto& [id, t] : tasks) {
    if (auto it = t.compiled_counts.find(Split::train); it != t.compiled_counts.end()) {
      total += it->second;
    }
  }
  return total;
}

nlohmann::ordered_json to_json(const FixtureManifest& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  j["scale"] = m.scale;
  j["tasks"] = nlohmann::ordered_json::object();
  for (const auto& [id, t] : m.tasks) {
    nlohmann::ordered_json tj;
    tj["generator_seed"] = t.generator_seed;
    tj["counts"] = split_map_json(t.counts);
    tj["compiled_counts"] = split_map_json(t.compiled_counts);
    tj["label_frequencies"] = nlohmann::ordered_json::object();
    for (const auto& [split, hist] : t.label_frequencies) {
      tj["label_frequencies"][std::string(to_string(split))] = hist;
    }
    j["tasks"][id] = std::move(tj);
  }
  j["compiled_train_total"] = m.compiled_train_total();
  return j;
}

FixtureManifest fixture_manifest_from_json(const nlohmann::json& j) {
  FixtureManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.scale = j.at("scale").get<double>();
  for (const auto& [id, tj] : j.at("tasks").items()) {
    FixtureTask t;
    t.generator_seed = tj.at("generator_seed").get<std::uint64_t>();
    t.counts = split_map_from_json(tj.at("counts"));
    t.compiled_counts = split_map_from_json(tj.at("compiled_counts"));
    for (const auto& [key, hist] : tj.at("label_frequencies").items()) {
      auto split = parse_split(key);
      if (!split) throw Error("unknown split '" + key + "' in fixture manifest");
      t.label_frequencies[*split] = hist.get<std::map<std::string, std::int64_t>>();
    }
    m.tasks[id] = std::move(t);
  }
  return m;
}

FixtureManifest read_fixture_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return fixture_manifest_from_json(nlohmann::json::parse(in));
}

FixtureManifest generate_fixtures(const std::filesystem::path& out_dir,
                                  const FixtureOptions& options, const Registry& registry) {
  std::filesystem::create_directories(out_dir);
  const auto task_ids = options.tasks.empty() ? registry.slugs() : registry.resolve(options.tasks);

  FixtureManifest manifest;
  manifest.seed = options.seed;
  manifest.scale = options.scale;

  for (const auto& task_id : task_ids) {
    const auto& task = registry.get(task_id);
    const auto fields = template_placeholders(task.input_template);
    FixtureTask ft;
    ft.generator_seed = mix_seed(options.seed, fnv1a64(task_id));

    for (const auto& [split, published] : task.expected_splits) {
      if (!options.splits.count(split)) continue;
      std::int64_t count = fixture_count(published, options);
      if (split == Split::train && task.cap && published >= *task.cap) {
        count = static_cast<std::int64_t>(
            std::ceil(static_cast<double>(count) * (1.0 + options.capped_surplus)));
      }

      Rng rng(mix_seed(ft.generator_seed, static_cast<std::uint64_t>(split)));
      std::string data;
      auto& hist = ft.label_frequencies[split];
      for (const auto& label : task.label_set) hist[label] = 0;
      for (std::int64_t i = 0; i < count; ++i) {
        RawRecord r;
        r.task_id = task_id;
        r.split = split;
        for (const auto& f : fields) r.fields[f] = word_salad(rng);
        if (task.reframing) {
          const auto offset = kScoreOffsets[static_cast<std::size_t>(i) % std::size(kScoreOffsets)];
          r.score = task.reframing->threshold + offset;
        } else {
          r.label = task.label_set[static_cast<std::size_t>(i) % task.label_set.size()];
        }
        ++hist[reframe_record(task, r, i).gold];
        data += to_json(r).dump();
        data += '\n';
      }

      std::ofstream out(out_dir / fmt::format("{}.{}.raw.jsonl", task_id, to_string(split)),
                        std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write fixtures into " + out_dir.string());
      out << data;

      ft.counts[split] = count;
      ft.compiled_counts[split] =
          split == Split::train && task.cap ? std::min(count, *task.cap) : count;
    }
    manifest.tasks[task_id] = std::move(ft);
  }

  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write fixtures into " + out_dir.string());
  out << to_json(manifest).dump(2) << '\n';
  return manifest;
}

FixtureOptions full_shape_options(std::uint64_t seed) {
  FixtureOptions o;
  o.seed = seed;
  o.scale = 1.0;
  o.min_per_split = 1;
  o.capped_surplus = 0.5;
  o.splits = {Split::train};
  return o;
}

std::optional<std::filesystem::path> real_raw_dir() {
  const char* dir = std::getenv("SOCINSTRUCT_REAL_RAW_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir);
}

}  // namespace socinstruct
