#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/corpus.hpp"
#include "socinstruct/registry.hpp"

namespace socinstruct {

// Greedy decoding, 16 new tokens, stop at the first newline.
struct DecodingParams {
  int max_tokens = 16;
  double temperature = 0.0;
  std::vector<std::string> stop{"\n"};

  bool operator==(const DecodingParams&) const = default;
};

nlohmann::ordered_json to_json(const DecodingParams& d);

enum class PromptModeKind { zero_shot, few_shot, cross_task };

struct PromptMode {
  PromptModeKind kind = PromptModeKind::zero_shot;
  std::size_t k = 0;
  std::string donor_id;

  static PromptMode zero_shot() { return {}; }
  static PromptMode few_shot(std::size_t k) { return {PromptModeKind::few_shot, k, {}}; }
  static PromptMode cross_task(std::string donor) {
    return {PromptModeKind::cross_task, 0, std::move(donor)};
  }

  // "zero_shot", "few_shot(k=5)", "cross_task(offensive)".
  std::string label() const;

  bool operator==(const PromptMode&) const = default;
};

nlohmann::ordered_json to_json(const PromptMode& m);
PromptMode prompt_mode_from_json(const nlohmann::json& j);

struct Prompt {
  std::string task_id;
  PromptMode mode;
  std::string text;
  std::int64_t target_source_index = 0;
  std::vector<std::int64_t> exemplar_indices;
  // The completion a perfect model would give, in the vocabulary the prompt
  // asks for. Never sent to a backend; read by the oracle stubs only.
  std::string expected_output;
  DecodingParams decoding;

  bool operator==(const Prompt&) const = default;
};

enum class PoolKind {
  train_split,    // k exemplars sampled per target from the pool
  provided_list,  // the first k entries of the pool, in order
};

struct FewShotPolicy {
  std::size_t k = 0;
  PoolKind pool = PoolKind::train_split;
  std::uint64_t seed = 0;
  std::string exemplar_separator = "\n\n";
};

// "Instruction: {instruction}\n\nInput: {input}\n\nOutput:"
Prompt build_zero_shot(const InstructionInstance& instance);

// Instruction once at the top, then k completed exemplar blocks, then the
// target block. Pool entries sharing the target's source_index are skipped.
// Throws InsufficientPool.
Prompt build_few_shot(const InstructionInstance& instance, const FewShotPolicy& policy,
                      std::span<const InstructionInstance> pool);

// Zero-shot prompt carrying the donor task's instruction.
Prompt build_cross_task(const InstructionInstance& instance, const TaskSpec& donor);

}  // namespace socinstruct
