#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "socinstruct/errors.hpp"

namespace socinstruct {

enum class Category {
  humor,
  offensiveness,
  sentiment_emotion,
  trustworthiness,
  other_social,
  related,
};

enum class Role { seen, related };

enum class Split { train, validation, test };

inline constexpr Split kAllSplits[] = {Split::train, Split::validation,
                                       Split::test};

std::string_view to_string(Category c);
std::string_view to_string(Role r);
std::string_view to_string(Split s);
std::optional<Category> parse_category(std::string_view s);
std::optional<Role> parse_role(std::string_view s);
std::optional<Split> parse_split(std::string_view s);

// Binarizes a numeric score: strictly above -> above_label, strictly below ->
// below_label, equal -> tie_label.
struct ThresholdRule {
  double threshold = 0.0;
  std::string above_label;
  std::string below_label;
  std::string tie_label;

  bool operator==(const ThresholdRule&) const = default;
};

struct TaskSpec {
  std::string task_id;
  std::string display_name;
  Category category = Category::other_social;
  Role role = Role::seen;
  std::vector<std::string> label_set;
  std::string instruction_text;
  // Placeholders are written {name}; rendered once, values are not rescanned.
  std::string input_template = "{text}";
  std::optional<ThresholdRule> reframing;
  std::map<Split, std::int64_t> expected_splits;
  std::optional<std::int64_t> cap;
  // Extra surface forms accepted for a canonical label (canonical -> aliases).
  std::map<std::string, std::vector<std::string>> label_aliases;

  bool operator==(const TaskSpec&) const = default;
};

struct TaskFilter {
  std::optional<Category> category;
  std::optional<Role> role;
};

// Closed, immutable set of task definitions. The builtin registry carries the
// 26 shipped tasks; user task-definition files can extend a copy of it.
class Registry {
 public:
  explicit Registry(std::vector<TaskSpec> tasks);

  static const Registry& builtin();

  // Throws UnknownTask.
  const TaskSpec& get(std::string_view task_id) const;
  bool contains(std::string_view task_id) const;

  // Declaration order.
  std::vector<TaskSpec> list(const TaskFilter& filter = {}) const;
  std::vector<std::string> slugs() const;
  std::size_t size() const { return tasks_.size(); }
  const std::vector<TaskSpec>& tasks() const { return tasks_; }

  // Case-, whitespace- and edge-punctuation-insensitive match against the
  // task's label set (and its aliases). Throws UnknownTask.
  std::optional<std::string> canonicalize_label(std::string_view task_id,
                                                std::string_view candidate) const;

  // Expands "all" / "seen" / "related" / category names / slugs, preserving
  // registry order and dropping duplicates. Throws UnknownTask.
  std::vector<std::string> resolve(const std::vector<std::string>& selection) const;

  // Copy of this registry with extra tasks appended. Throws Error on
  // duplicate ids or invalid definitions.
  Registry extended(std::vector<TaskSpec> extra) const;

 private:
  std::vector<TaskSpec> tasks_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Label-set lookup behind Registry::canonicalize_label.
std::optional<std::string> match_canonical_label(const TaskSpec& task,
                                                 std::string_view candidate);

const TaskSpec& get_task(std::string_view task_id);
std::vector<TaskSpec> list_tasks(const TaskFilter& filter = {});
std::optional<std::string> canonicalize_label(std::string_view task_id,
                                              std::string_view candidate);

// Checks the structural invariants of one spec; returns problems found.
std::vector<std::string> check_task_spec(const TaskSpec& spec);

// Sum of expected train counts over seen tasks.
std::int64_t expected_train_total(const Registry& registry);

// Reads user task definitions from a .json or .toml file (format documented in
// docs/task_definitions.md). Throws ConfigError.
std::vector<TaskSpec> load_task_definitions(const std::filesystem::path& path);

// Hex digest used in run manifests to pin the instruction text of a run.
std::string template_hash(const TaskSpec& spec);

}  // namespace socinstruct
