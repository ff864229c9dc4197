#include "socinstruct/prompt.hpp"

#include <numeric>

#include <fmt/format.h>

#include "socinstruct/errors.hpp"
#include "socinstruct/rng.hpp"

namespace socinstruct {

namespace {

constexpr std::string_view kBlockSeparator = "\n\n";

std::string instruction_header(std::string_view instruction) {
  return fmt::format("Instruction: {}{}", instruction, kBlockSeparator);
}

std::string query_block(std::string_view input) {
  return fmt::format("Input: {}{}Output:", input, kBlockSeparator);
}

std::string solved_block(const InstructionInstance& exemplar) {
  return fmt::format("{} {}", query_block(exemplar.input), exemplar.gold);
}

}  // namespace

nlohmann::ordered_json to_json(const DecodingParams& d) {
  nlohmann::ordered_json j;
  j["max_tokens"] = d.max_tokens;
  j["temperature"] = d.temperature;
  j["stop"] = d.stop;
  return j;
}

std::string PromptMode::label() const {
  switch (kind) {
    case PromptModeKind::zero_shot: return "zero_shot";
    case PromptModeKind::few_shot: return fmt::format("few_shot(k={})", k);
    case PromptModeKind::cross_task: return fmt::format("cross_task({})", donor_id);
  }
  return "zero_shot";
}

nlohmann::ordered_json to_json(const PromptMode& m) {
  nlohmann::ordered_json j;
  switch (m.kind) {
    case PromptModeKind::zero_shot: j["kind"] = "zero_shot"; break;
    case PromptModeKind::few_shot:
      j["kind"] = "few_shot";
      j["k"] = m.k;
      break;
    case PromptModeKind::cross_task:
      j["kind"] = "cross_task";
      j["donor"] = m.donor_id;
      break;
  }
  return j;
}

PromptMode prompt_mode_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "zero_shot") return PromptMode::zero_shot();
  if (kind == "few_shot") return PromptMode::few_shot(j.at("k").get<std::size_t>());
  if (kind == "cross_task") return PromptMode::cross_task(j.at("donor").get<std::string>());
  throw Error("unknown prompt mode '" + kind + "'");
}

Prompt build_zero_shot(const InstructionInstance& instance) {
  Prompt p;
  p.task_id = instance.task_id;
  p.mode = PromptMode::zero_shot();
  p.text = instruction_header(instance.instruction) + query_block(instance.input);
  p.target_source_index = instance.source_index;
  p.expected_output = instance.gold;
  return p;
}

Prompt build_few_shot(const InstructionInstance& instance, const FewShotPolicy& policy,
                      std::span<const InstructionInstance> pool) {
  if (policy.k == 0) return build_zero_shot(instance);

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].source_index != instance.source_index) eligible.push_back(i);
  }
  if (policy.k > eligible.size()) throw InsufficientPool(policy.k, eligible.size());

  if (policy.pool == PoolKind::train_split) {
    Rng rng(mix_seed(policy.seed, static_cast<std::uint64_t>(instance.source_index)));
    for (std::size_t i = 0; i < policy.k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(eligible.size() - i));
      std::swap(eligible[i], eligible[j]);
    }
  }
  eligible.resize(policy.k);

  Prompt p;
  p.task_id = instance.task_id;
  p.mode = PromptMode::few_shot(policy.k);
  p.target_source_index = instance.source_index;
  p.expected_output = instance.gold;
  p.text = instruction_header(instance.instruction);
  for (std::size_t idx : eligible) {
    p.text += solved_block(pool[idx]);
    p.text += policy.exemplar_separator;
    p.exemplar_indices.push_back(pool[idx].source_index);
  }
  p.text += query_block(instance.input);
  return p;
}

Prompt build_cross_task(const InstructionInstance& instance, const TaskSpec& donor) {
  if (donor.task_id == instance.task_id) return build_zero_shot(instance);
  InstructionInstance borrowed = instance;
  borrowed.instruction = donor.instruction_text;
  Prompt p = build_zero_shot(borrowed);
  p.mode = PromptMode::cross_task(donor.task_id);
  return p;
}

}  // namespace socinstruct
