#include "socinstruct/registry.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <toml.hpp>

#include "registry_data.hpp"
#include "socinstruct/errors.hpp"
#include "socinstruct/label_parser.hpp"
#include "socinstruct/rng.hpp"
#include "socinstruct/text.hpp"

namespace socinstruct {

namespace {

constexpr std::pair<Category, std::string_view> kCategoryNames[] = {
    {Category::humor, "humor"},
    {Category::offensiveness, "offensiveness"},
    {Category::sentiment_emotion, "sentiment_emotion"},
    {Category::trustworthiness, "trustworthiness"},
    {Category::other_social, "other_social"},
    {Category::related, "related"},
};

bool is_slug(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (cat == c) return name;
  }
  return "unknown";
}

std::string_view to_string(Role r) { return r == Role::seen ? "seen" : "related"; }

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view s) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (name == s) return cat;
  }
  return std::nullopt;
}

std::optional<Role> parse_role(std::string_view s) {
  if (s == "seen") return Role::seen;
  if (s == "related") return Role::related;
  return std::nullopt;
}

std::optional<Split> parse_split(std::string_view s) {
  for (Split split : kAllSplits) {
    if (to_string(split) == s) return split;
  }
  return std::nullopt;
}

std::vector<std::string> check_task_spec(const TaskSpec& spec) {
  std::vector<std::string> problems;
  auto problem = [&](std::string msg) {
    problems.push_back(fmt::format("{}: {}", spec.task_id, msg));
  };
  if (!is_slug(spec.task_id)) problem("task_id must be lowercase snake_case");
  if (spec.instruction_text.empty()) problem("instruction_text is empty");
  if (spec.label_set.size() < 2) problem("label_set needs at least two labels");
  if (template_placeholders(spec.input_template).empty()) {
    problem("input_template has no placeholders");
  }

  std::set<std::string> surface;
  auto add_surface = [&](const std::string& form, const std::string& owner) {
    std::string n = normalize(form);
    if (n.empty()) problem(fmt::format("label '{}' normalizes to empty", owner));
    if (!surface.insert(n).second) {
      problem(fmt::format("label form '{}' collides after normalization", form));
    }
  };
  for (const auto& label : spec.label_set) add_surface(label, label);
  for (const auto& [label, aliases] : spec.label_aliases) {
    if (std::find(spec.label_set.begin(), spec.label_set.end(), label) ==
        spec.label_set.end()) {
      problem(fmt::format("alias target '{}' is not a label", label));
    }
    for (const auto& alias : aliases) add_surface(alias, label);
  }

  if (spec.reframing) {
    const auto& r = *spec.reframing;
    for (const auto* l : {&r.above_label, &r.below_label, &r.tie_label}) {
      if (std::find(spec.label_set.begin(), spec.label_set.end(), *l) ==
          spec.label_set.end()) {
        problem(fmt::format("threshold label '{}' is not in label_set", *l));
      }
    }
  }
  if (spec.role == Role::related) {
    for (const auto& [split, count] : spec.expected_splits) {
      if (split != Split::test) problem("related tasks only have a test split");
    }
  }
  if (spec.cap && *spec.cap <= 0) problem("cap must be positive");
  return problems;
}

Registry::Registry(std::vector<TaskSpec> tasks) : tasks_(std::move(tasks)) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    auto p = check_task_spec(tasks_[i]);
    problems.insert(problems.end(), p.begin(), p.end());
    if (!index_.emplace(tasks_[i].task_id, i).second) {
      problems.push_back("duplicate task id " + tasks_[i].task_id);
    }
  }
  if (!problems.empty()) {
    throw Error("invalid task registry: " + join(problems, "; "));
  }
}

const Registry& Registry::builtin() {
  static const Registry registry(detail::builtin_tasks());
  return registry;
}

const TaskSpec& Registry::get(std::string_view task_id) const {
  auto it = index_.find(std::string(task_id));
  if (it == index_.end()) {
    throw UnknownTask(std::string(task_id), join(slugs(), ", "));
  }
  return tasks_[it->second];
}

bool Registry::contains(std::string_view task_id) const {
  return index_.count(std::string(task_id)) > 0;
}

std::vector<TaskSpec> Registry::list(const TaskFilter& filter) const {
  std::vector<TaskSpec> out;
  for (const auto& t : tasks_) {
    if (filter.category && t.category != *filter.category) continue;
    if (filter.role && t.role != *filter.role) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<std::string> Registry::slugs() const {
  std::vector<std::string> out;
  out.reserve(tasks_.size());
  for (const auto& t : tasks_) out.push_back(t.task_id);
  return out;
}

std::optional<std::string> Registry::canonicalize_label(
    std::string_view task_id, std::string_view candidate) const {
  return match_canonical_label(get(task_id), candidate);
}

std::optional<std::string> match_canonical_label(const TaskSpec& task,
                                                 std::string_view candidate) {
  const std::string needle = normalize(candidate);
  if (needle.empty()) return std::nullopt;
  for (const auto& label : task.label_set) {
    if (normalize(label) == needle) return label;
  }
  for (const auto& [label, aliases] : task.label_aliases) {
    for (const auto& alias : aliases) {
      if (normalize(alias) == needle) return label;
    }
  }
  return std::nullopt;
}

std::vector<std::string> Registry::resolve(
    const std::vector<std::string>& selection) const {
  std::set<std::string> chosen;
  for (const auto& item : selection) {
    if (item == "all") {
      for (const auto& t : tasks_) chosen.insert(t.task_id);
    } else if (auto role = parse_role(item)) {
      for (const auto& t : list(TaskFilter{std::nullopt, *role})) chosen.insert(t.task_id);
    } else if (auto cat = parse_category(item); cat && !contains(item)) {
      for (const auto& t : list(TaskFilter{*cat, std::nullopt})) chosen.insert(t.task_id);
    } else {
      chosen.insert(get(item).task_id);
    }
  }
  std::vector<std::string> out;
  for (const auto& t : tasks_) {
    if (chosen.count(t.task_id)) out.push_back(t.task_id);
  }
  return out;
}

Registry Registry::extended(std::vector<TaskSpec> extra) const {
  std::vector<TaskSpec> all = tasks_;
  for (auto& t : extra) all.push_back(std::move(t));
  return Registry(std::move(all));
}

const TaskSpec& get_task(std::string_view task_id) {
  return Registry::builtin().get(task_id);
}

std::vector<TaskSpec> list_tasks(const TaskFilter& filter) {
  return Registry::builtin().list(filter);
}

std::optional<std::string> canonicalize_label(std::string_view task_id,
                                              std::string_view candidate) {
  return Registry::builtin().canonicalize_label(task_id, candidate);
}

std::int64_t expected_train_total(const Registry& registry) {
  std::int64_t total = 0;
  for (const auto& t : registry.list(TaskFilter{std::nullopt, Role::seen})) {
    if (auto it = t.expected_splits.find(Split::train); it != t.expected_splits.end()) {
      total += it->second;
    }
  }
  return total;
}

std::string template_hash(const TaskSpec& spec) {
  return fmt::format("fnv1a64:{:016x}", fnv1a64(spec.instruction_text));
}

namespace {

TaskSpec task_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  TaskSpec t;
  t.task_id = j.at("task_id").get<std::string>();
  t.display_name = j.value("display_name", t.task_id);
  auto cat = parse_category(j.value("category", std::string("other_social")));
  if (!cat) throw ConfigError(t.task_id + ": unknown category");
  t.category = *cat;
  auto role = parse_role(j.value("role", std::string("seen")));
  if (!role) throw ConfigError(t.task_id + ": unknown role");
  t.role = *role;
  t.label_set = j.at("labels").get<std::vector<std::string>>();
  if (j.contains("instruction_file")) {
    std::ifstream in(base / j.at("instruction_file").get<std::string>(), std::ios::binary);
    if (!in) throw ConfigError(t.task_id + ": cannot read instruction_file");
    std::ostringstream ss;
    ss << in.rdbuf();
    t.instruction_text = ss.str();
  } else {
    t.instruction_text = j.at("instruction").get<std::string>();
  }
  t.input_template = j.value("input_template", std::string("{text}"));
  if (j.contains("threshold")) {
    const auto& r = j.at("threshold");
    ThresholdRule rule;
    rule.threshold = r.at("threshold").get<double>();
    rule.above_label = r.at("above").get<std::string>();
    rule.below_label = r.at("below").get<std::string>();
    rule.tie_label = r.value("tie", rule.below_label);
    t.reframing = rule;
  }
  if (j.contains("expected_splits")) {
    for (const auto& [name, count] : j.at("expected_splits").items()) {
      auto split = parse_split(name);
      if (!split) throw ConfigError(t.task_id + ": unknown split " + name);
      t.expected_splits[*split] = count.get<std::int64_t>();
    }
  }
  if (j.contains("cap")) t.cap = j.at("cap").get<std::int64_t>();
  if (j.contains("aliases")) {
    t.label_aliases =
        j.at("aliases").get<std::map<std::string, std::vector<std::string>>>();
  }
  return t;
}

}  // namespace

std::vector<TaskSpec> load_task_definitions(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    if (path.extension() == ".toml") {
      auto table = toml::parse_file(path.string());
      std::ostringstream ss;
      ss << toml::json_formatter{table};
      doc = nlohmann::json::parse(ss.str());
    } else {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open task definitions " + path.string());
      doc = nlohmann::json::parse(in);
    }
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.description()));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }

  std::vector<TaskSpec> tasks;
  try {
    for (const auto& entry : doc.at("tasks")) {
      tasks.push_back(task_from_json(entry, path.parent_path()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  for (const auto& t : tasks) {
    if (auto problems = check_task_spec(t); !problems.empty()) {
      throw ConfigError(join(problems, "; "));
    }
  }
  return tasks;
}

}  // namespace socinstruct
