#include "socinstruct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "socinstruct/errors.hpp"
#include "socinstruct/rng.hpp"

namespace socinstruct {

namespace {

// Row-major counts with |labels| rows and |labels| + 1 columns.
double macro_f1_from_counts(const std::int64_t* counts, std::size_t n_labels) {
  const std::size_t cols = n_labels + 1;
  double sum = 0.0;
  for (std::size_t c = 0; c < n_labels; ++c) {
    const std::int64_t tp = counts[c * cols + c];
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    for (std::size_t g = 0; g < n_labels; ++g) {
      if (g != c) fp += counts[g * cols + c];
    }
    for (std::size_t p = 0; p < cols; ++p) {
      if (p != c) fn += counts[c * cols + p];
    }
    const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return n_labels == 0 ? 0.0 : sum / static_cast<double>(n_labels);
}

std::unordered_map<std::string, std::size_t> label_index(const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);
  return index;
}

std::vector<std::uint32_t> encode_golds(std::span<const std::string> golds,
                                        const std::unordered_map<std::string, std::size_t>& index) {
  std::vector<std::uint32_t> out;
  out.reserve(golds.size());
  for (const auto& g : golds) {
    auto it = index.find(g);
    if (it == index.end()) throw UnknownLabel(fmt::format("gold label '{}' not in label set", g));
    out.push_back(static_cast<std::uint32_t>(it->second));
  }
  return out;
}

std::vector<std::uint32_t> encode_preds(std::span<const std::optional<std::string>> preds,
                                        const std::unordered_map<std::string, std::size_t>& index,
                                        std::size_t invalid_column) {
  std::vector<std::uint32_t> out;
  out.reserve(preds.size());
  for (const auto& p : preds) {
    if (!p) {
      out.push_back(static_cast<std::uint32_t>(invalid_column));
      continue;
    }
    auto it = index.find(*p);
    if (it == index.end()) {
      throw UnknownLabel(fmt::format("predicted label '{}' not in label set", *p));
    }
    out.push_back(static_cast<std::uint32_t>(it->second));
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

}  // namespace

std::int64_t ConfusionMatrix::invalid_count() const {
  std::int64_t total = 0;
  for (const auto& row : counts) total += row[invalid_column()];
  return total;
}

std::int64_t ConfusionMatrix::correct() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i][i];
  return total;
}

nlohmann::ordered_json to_json(const ConfusionMatrix& cm) {
  nlohmann::ordered_json j;
  j["labels"] = cm.labels;
  j["columns"] = cm.labels;
  j["columns"].push_back(kInvalidLabel);
  j["counts"] = cm.counts;
  j["n"] = cm.n;
  return j;
}

ConfusionMatrix confusion_from_json(const nlohmann::json& j) {
  ConfusionMatrix cm;
  cm.labels = j.at("labels").get<std::vector<std::string>>();
  cm.counts = j.at("counts").get<std::vector<std::vector<std::int64_t>>>();
  cm.n = j.at("n").get<std::int64_t>();
  return cm;
}

ConfusionMatrix confusion(std::span<const std::string> golds,
                          std::span<const std::optional<std::string>> preds,
                          const std::vector<std::string>& labels, const std::string& task_id) {
  if (golds.size() != preds.size()) {
    throw LengthMismatch(
        fmt::format("{} gold labels vs {} predictions", golds.size(), preds.size()));
  }
  const auto index = label_index(labels);
  const auto g = encode_golds(golds, index);
  const auto p = encode_preds(preds, index, labels.size());

  ConfusionMatrix cm;
  cm.task_id = task_id;
  cm.labels = labels;
  cm.counts.assign(labels.size(), std::vector<std::int64_t>(labels.size() + 1, 0));
  for (std::size_t i = 0; i < g.size(); ++i) ++cm.counts[g[i]][p[i]];
  cm.n = static_cast<std::int64_t>(g.size());
  return cm;
}

ConfusionMatrix confusion(std::span<const std::string> golds, std::span<const Prediction> preds,
                          const std::vector<std::string>& labels, const std::string& task_id) {
  std::vector<std::optional<std::string>> parsed;
  parsed.reserve(preds.size());
  for (const auto& p : preds) parsed.push_back(p.parsed);
  return confusion(golds, parsed, labels, task_id);
}

double macro_f1(const ConfusionMatrix& cm) {
  const std::size_t n_labels = cm.labels.size();
  std::vector<std::int64_t> flat;
  flat.reserve(n_labels * (n_labels + 1));
  for (const auto& row : cm.counts) flat.insert(flat.end(), row.begin(), row.end());
  return macro_f1_from_counts(flat.data(), n_labels);
}

double accuracy(const ConfusionMatrix& cm) {
  return cm.n == 0 ? 0.0 : static_cast<double>(cm.correct()) / static_cast<double>(cm.n);
}

double invalid_rate(const ConfusionMatrix& cm) {
  return cm.n == 0 ? 0.0 : static_cast<double>(cm.invalid_count()) / static_cast<double>(cm.n);
}

nlohmann::ordered_json to_json(const SignificanceResult& r) {
  nlohmann::ordered_json j;
  j["delta_observed"] = r.delta_observed;
  j["p_value"] = r.p_value;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["resamples"] = r.resamples;
  j["seed"] = r.seed;
  j["two_sided"] = r.two_sided;
  return j;
}

SignificanceResult significance_from_json(const nlohmann::json& j) {
  SignificanceResult r;
  r.delta_observed = j.at("delta_observed").get<double>();
  r.p_value = j.at("p_value").get<double>();
  r.ci_low = j.at("ci_low").get<double>();
  r.ci_high = j.at("ci_high").get<double>();
  r.resamples = j.at("resamples").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.two_sided = j.value("two_sided", false);
  return r;
}

SignificanceResult paired_bootstrap(std::span<const std::string> golds,
                                    std::span<const std::optional<std::string>> preds_a,
                                    std::span<const std::optional<std::string>> preds_b,
                                    const std::vector<std::string>& labels,
                                    const BootstrapOptions& options) {
  if (golds.size() != preds_a.size() || golds.size() != preds_b.size()) {
    throw LengthMismatch(fmt::format("golds {}, system A {}, system B {}", golds.size(),
                                     preds_a.size(), preds_b.size()));
  }
  if (options.resamples < 1000) {
    throw std::invalid_argument("paired bootstrap needs at least 1000 resamples");
  }
  if (golds.empty()) throw LengthMismatch("paired bootstrap over zero examples");

  const auto index = label_index(labels);
  const auto g = encode_golds(golds, index);
  const auto a = encode_preds(preds_a, index, labels.size());
  const auto b = encode_preds(preds_b, index, labels.size());
  const std::size_t n = g.size();
  const std::size_t n_labels = labels.size();
  const std::size_t cells = n_labels * (n_labels + 1);

  SignificanceResult result;
  result.resamples = options.resamples;
  result.seed = options.seed;
  result.two_sided = options.two_sided;
  result.delta_observed = macro_f1(confusion(golds, preds_a, labels)) -
                          macro_f1(confusion(golds, preds_b, labels));

  std::vector<double> deltas(static_cast<std::size_t>(options.resamples));
  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::int64_t> ca(cells);
    std::vector<std::int64_t> cb(cells);
    const std::size_t cols = n_labels + 1;
    for (std::size_t r = begin; r < end; ++r) {
      std::fill(ca.begin(), ca.end(), 0);
      std::fill(cb.begin(), cb.end(), 0);
      Rng rng(mix_seed(options.seed + r, 0));
      for (std::size_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(rng.below(n));
        ++ca[g[k] * cols + a[k]];
        ++cb[g[k] * cols + b[k]];
      }
      deltas[r] = macro_f1_from_counts(ca.data(), n_labels) -
                  macro_f1_from_counts(cb.data(), n_labels);
    }
  };

  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, 16));
  const std::size_t total = deltas.size();
  if (threads == 1) {
    run_range(0, total);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (total + threads - 1) / threads;
    for (std::size_t begin = 0; begin < total; begin += chunk) {
      workers.emplace_back(run_range, begin, std::min(total, begin + chunk));
    }
  }

  const auto non_positive = std::count_if(deltas.begin(), deltas.end(),
                                          [](double d) { return d <= 0.0; });
  const double frac_le = static_cast<double>(non_positive) / static_cast<double>(total);
  if (options.two_sided) {
    const auto non_negative = std::count_if(deltas.begin(), deltas.end(),
                                            [](double d) { return d >= 0.0; });
    const double frac_ge = static_cast<double>(non_negative) / static_cast<double>(total);
    result.p_value = std::min(1.0, 2.0 * std::min(frac_le, frac_ge));
  } else {
    result.p_value = frac_le;
  }

  std::sort(deltas.begin(), deltas.end());
  // The reported interval always brackets the observed delta.
  result.ci_low = std::min(percentile(deltas, 0.025), result.delta_observed);
  result.ci_high = std::max(percentile(deltas, 0.975), result.delta_observed);
  return result;
}

}  // namespace socinstruct
