#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/errors.hpp"
#include "socinstruct/label_parser.hpp"

namespace socinstruct {

// Column name of the reserved bucket for unparseable generations.
inline constexpr const char* kInvalidLabel = "INVALID";

// Rows are gold labels; columns are the same labels plus a trailing INVALID
// column.
struct ConfusionMatrix {
  std::string task_id;
  std::vector<std::string> labels;
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t n = 0;

  std::size_t invalid_column() const { return labels.size(); }
  std::int64_t invalid_count() const;
  std::int64_t correct() const;

  bool operator==(const ConfusionMatrix&) const = default;
};

nlohmann::ordered_json to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const nlohmann::json& j);

// A missing prediction (nullopt) is tallied as INVALID. Throws LengthMismatch
// or UnknownLabel (gold outside labels, or a prediction outside labels).
ConfusionMatrix confusion(std::span<const std::string> golds,
                          std::span<const std::optional<std::string>> preds,
                          const std::vector<std::string>& labels,
                          const std::string& task_id = {});
ConfusionMatrix confusion(std::span<const std::string> golds,
                          std::span<const Prediction> preds,
                          const std::vector<std::string>& labels,
                          const std::string& task_id = {});

// Unweighted mean of per-label F1. INVALID is not averaged but counts as a
// false negative of the gold label. Zero denominators give 0.
double macro_f1(const ConfusionMatrix& cm);
double accuracy(const ConfusionMatrix& cm);
double invalid_rate(const ConfusionMatrix& cm);

struct SignificanceResult {
  double delta_observed = 0.0;  // macro-F1(A) - macro-F1(B)
  double p_value = 1.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t resamples = 0;
  std::uint64_t seed = 0;
  bool two_sided = false;

  bool operator==(const SignificanceResult&) const = default;
};

nlohmann::ordered_json to_json(const SignificanceResult& r);
SignificanceResult significance_from_json(const nlohmann::json& j);

struct BootstrapOptions {
  std::int64_t resamples = 10000;
  std::uint64_t seed = 0;
  // One-sided tests A > B: p = share of resamples with delta <= 0.
  bool two_sided = false;
  // 0 = hardware concurrency. Results do not depend on this.
  unsigned threads = 0;
};

// Paired bootstrap over examples. Resample i draws its indices from an
// engine seeded with (seed + i), so results are schedule-independent.
// Throws LengthMismatch, or std::invalid_argument when resamples < 1000.
SignificanceResult paired_bootstrap(std::span<const std::string> golds,
                                    std::span<const std::optional<std::string>> preds_a,
                                    std::span<const std::optional<std::string>> preds_b,
                                    const std::vector<std::string>& labels,
                                    const BootstrapOptions& options = {});

}  // namespace socinstruct
