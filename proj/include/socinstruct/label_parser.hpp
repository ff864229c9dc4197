#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socinstruct/registry.hpp"

namespace socinstruct {

enum class MatchKind { exact, prefix, contained, none };

// strict: exact and prefix stages only. contained: all three stages.
enum class ParserStrictness { strict, contained };

std::string_view to_string(MatchKind k);
std::string_view to_string(ParserStrictness s);
std::optional<MatchKind> parse_match_kind(std::string_view s);
std::optional<ParserStrictness> parse_strictness(std::string_view s);

// A parsed generation. parsed is empty exactly when the generation matched no
// label (the INVALID bucket).
struct Prediction {
  std::size_t prompt_index = 0;
  std::string task_id;
  std::string raw_text;
  std::optional<std::string> parsed;
  MatchKind match_kind = MatchKind::none;

  bool valid() const { return parsed.has_value(); }
  bool operator==(const Prediction&) const = default;
};

// Lowercases (ASCII), collapses whitespace runs, strips edge whitespace and
// the characters . , ! ? : ; " ' and any leading "output:" token.
// Idempotent.
std::string normalize(std::string_view text);

// Three-stage cascade over normalized text: exact equality, unique label
// prefix, unique contained label. Labels are tried longest first and a
// matched span hides any shorter label lying inside it.
Prediction parse_label(const TaskSpec& task, std::string_view raw_text,
                       ParserStrictness strictness = ParserStrictness::contained,
                       std::size_t prompt_index = 0);

// One line of predictions.jsonl: the parsed prediction plus what scoring and
// run alignment need.
struct ScoredPrediction {
  Prediction prediction;
  std::string gold;
  std::int64_t target_source_index = 0;
  std::optional<std::string> backend_error;

  bool operator==(const ScoredPrediction&) const = default;
};

nlohmann::ordered_json to_json(const ScoredPrediction& p);
ScoredPrediction scored_prediction_from_json(const nlohmann::json& j);

void write_predictions(const std::filesystem::path& path,
                       const std::vector<ScoredPrediction>& predictions);
std::vector<ScoredPrediction> read_predictions(const std::filesystem::path& path);

}  // namespace socinstruct
