#include "socinstruct/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

#include "socinstruct/rng.hpp"

namespace socinstruct {

namespace {

using Clock = std::chrono::steady_clock;

class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("bad endpoint_url '" + url + "'");
  Endpoint e{m[1].str(), m[2].matched ? m[2].str() : std::string{}};
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  if (e.path.size() < 12 || e.path.compare(e.path.size() - 12, 12, "/completions") != 0) {
    if (e.path.size() >= 3 && e.path.compare(e.path.size() - 3, 3, "/v1") == 0) {
      e.path += "/completions";
    } else {
      e.path += "/v1/completions";
    }
  }
  return e;
}

std::int64_t elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

Generation error_generation(std::int64_t index, GenerationError kind, std::string message,
                            int attempts, std::int64_t latency_ms) {
  Generation g;
  g.prompt_index = index;
  g.error_kind = kind;
  g.backend_error = std::move(message);
  g.attempts = attempts;
  g.latency_ms = latency_ms;
  return g;
}

Generation text_generation(std::int64_t index, std::string text, int attempts,
                           std::int64_t latency_ms) {
  Generation g;
  g.prompt_index = index;
  g.raw_text = std::move(text);
  g.attempts = attempts;
  g.latency_ms = latency_ms;
  return g;
}

class OracleBackend : public CompletionBackend {
 public:
  Generation complete(const Prompt& prompt, std::int64_t index) override {
    return text_generation(index, prompt.expected_output, 1, 0);
  }
};

class ConstantBackend : public CompletionBackend {
 public:
  explicit ConstantBackend(std::string label) : label_(std::move(label)) {}
  Generation complete(const Prompt&, std::int64_t index) override {
    return text_generation(index, label_, 1, 0);
  }

 private:
  std::string label_;
};

class NoisyOracleBackend : public CompletionBackend {
 public:
  NoisyOracleBackend(double p, std::uint64_t seed, const Registry& registry)
      : p_(p), seed_(seed), registry_(registry) {}

  Generation complete(const Prompt& prompt, std::int64_t index) override {
    Rng rng(mix_seed(seed_, static_cast<std::uint64_t>(index)));
    if (rng.unit() >= p_) return text_generation(index, prompt.expected_output, 1, 0);

    const std::string& vocab_task = prompt.mode.kind == PromptModeKind::cross_task
                                        ? prompt.mode.donor_id
                                        : prompt.task_id;
    std::vector<std::string> wrong;
    for (const auto& label : registry_.get(vocab_task).label_set) {
      if (label != prompt.expected_output) wrong.push_back(label);
    }
    if (wrong.empty()) return text_generation(index, prompt.expected_output, 1, 0);
    return text_generation(index, wrong[rng.below(wrong.size())], 1, 0);
  }

 private:
  double p_;
  std::uint64_t seed_;
  const Registry& registry_;
};

class HttpBackend : public CompletionBackend {
 public:
  explicit HttpBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}

  Generation complete(const Prompt& prompt, std::int64_t index) override {
    const auto start = Clock::now();
    const int max_attempts = cfg_.max_retries + 1;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      try {
        auto text = http_complete_once(cfg_, prompt);
        return text_generation(index, std::move(text), attempt, elapsed_ms(start));
      } catch (const BackendRejected& e) {
        return error_generation(index, GenerationError::rejected,
                                std::string("BackendRejected: ") + e.what(), attempt,
                                elapsed_ms(start));
      } catch (const ProtocolError& e) {
        return error_generation(index, GenerationError::protocol,
                                std::string("ProtocolError: ") + e.what(), attempt,
                                elapsed_ms(start));
      } catch (const TransientError& e) {
        last_error = e.what();
      }
      if (attempt < max_attempts) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.retry_backoff_ms << (attempt - 1)));
      }
    }
    return error_generation(index, GenerationError::unreachable,
                            fmt::format("BackendUnreachable after {} attempts: {}", max_attempts,
                                        last_error),
                            max_attempts, elapsed_ms(start));
  }

 private:
  BackendConfig cfg_;
};

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::http_completion: return "http_completion";
    case BackendKind::stub_oracle: return "stub_oracle";
    case BackendKind::stub_constant: return "stub_constant";
    case BackendKind::stub_noisy_oracle: return "stub_noisy_oracle";
  }
  return "stub_oracle";
}

std::optional<BackendKind> parse_backend_kind(std::string_view s) {
  for (auto k : {BackendKind::http_completion, BackendKind::stub_oracle,
                 BackendKind::stub_constant, BackendKind::stub_noisy_oracle}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

void BackendConfig::validate() const {
  if (kind == BackendKind::http_completion) {
    if (!endpoint_url || endpoint_url->empty()) {
      throw ConfigError("http_completion backend needs endpoint_url");
    }
    if (endpoint_url->rfind("https://", 0) == 0) {
      throw ConfigError("https endpoints are not supported; use a plain http endpoint");
    }
    split_endpoint(*endpoint_url);
  }
  if (kind == BackendKind::stub_constant && constant_label.empty()) {
    throw ConfigError("stub_constant backend needs a label");
  }
  if (!(noise_p >= 0.0 && noise_p <= 1.0)) {
    throw ConfigError(fmt::format("noise p must lie in [0, 1], got {}", noise_p));
  }
  if (timeout_ms <= 0) throw ConfigError("timeout_ms must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (requests_per_second && !(*requests_per_second > 0.0)) {
    throw ConfigError("requests_per_second must be positive");
  }
  if (retry_backoff_ms < 0) throw ConfigError("retry_backoff_ms must be >= 0");
}

nlohmann::ordered_json to_json(const BackendConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(cfg.kind);
  j["endpoint_url"] = cfg.endpoint_url ? nlohmann::ordered_json(*cfg.endpoint_url) : nullptr;
  j["model_name"] = cfg.model_name ? nlohmann::ordered_json(*cfg.model_name) : nullptr;
  if (cfg.kind == BackendKind::stub_constant) j["label"] = cfg.constant_label;
  if (cfg.kind == BackendKind::stub_noisy_oracle) {
    j["p"] = cfg.noise_p;
    j["seed"] = cfg.noise_seed;
  }
  j["timeout_ms"] = cfg.timeout_ms;
  j["max_retries"] = cfg.max_retries;
  j["max_in_flight"] = cfg.max_in_flight;
  j["requests_per_second"] =
      cfg.requests_per_second ? nlohmann::ordered_json(*cfg.requests_per_second) : nullptr;
  j["retry_backoff_ms"] = cfg.retry_backoff_ms;
  j["api_key_env"] = cfg.api_key_env;
  return j;
}

BackendConfig backend_config_from_json(const nlohmann::json& j) {
  BackendConfig cfg;
  const auto kind = j.at("kind").get<std::string>();
  auto parsed = parse_backend_kind(kind);
  if (!parsed) throw ConfigError("unknown backend kind '" + kind + "'");
  cfg.kind = *parsed;
  if (j.contains("endpoint_url") && !j["endpoint_url"].is_null()) {
    cfg.endpoint_url = j["endpoint_url"].get<std::string>();
  }
  if (j.contains("model_name") && !j["model_name"].is_null()) {
    cfg.model_name = j["model_name"].get<std::string>();
  }
  cfg.constant_label = j.value("label", std::string{});
  cfg.noise_p = j.value("p", 0.0);
  cfg.noise_seed = j.value("seed", std::uint64_t{0});
  cfg.timeout_ms = j.value("timeout_ms", cfg.timeout_ms);
  cfg.max_retries = j.value("max_retries", cfg.max_retries);
  cfg.max_in_flight = j.value("max_in_flight", cfg.max_in_flight);
  if (j.contains("requests_per_second") && !j["requests_per_second"].is_null()) {
    cfg.requests_per_second = j["requests_per_second"].get<double>();
  }
  cfg.retry_backoff_ms = j.value("retry_backoff_ms", cfg.retry_backoff_ms);
  cfg.api_key_env = j.value("api_key_env", cfg.api_key_env);
  return cfg;
}

std::string_view to_string(GenerationError e) {
  switch (e) {
    case GenerationError::none: return "none";
    case GenerationError::unreachable: return "unreachable";
    case GenerationError::rejected: return "rejected";
    case GenerationError::protocol: return "protocol";
    case GenerationError::cancelled: return "cancelled";
  }
  return "none";
}

nlohmann::ordered_json to_json(const Generation& g) {
  nlohmann::ordered_json j;
  j["prompt_index"] = g.prompt_index;
  j["raw_text"] = g.raw_text ? nlohmann::ordered_json(*g.raw_text) : nullptr;
  j["latency_ms"] = g.latency_ms;
  j["attempts"] = g.attempts;
  j["backend_error"] = g.backend_error ? nlohmann::ordered_json(*g.backend_error) : nullptr;
  j["error_kind"] = to_string(g.error_kind);
  return j;
}

Generation generation_from_json(const nlohmann::json& j) {
  Generation g;
  g.prompt_index = j.at("prompt_index").get<std::int64_t>();
  if (!j.at("raw_text").is_null()) g.raw_text = j["raw_text"].get<std::string>();
  g.latency_ms = j.value("latency_ms", std::int64_t{0});
  g.attempts = j.value("attempts", 0);
  if (j.contains("backend_error") && !j["backend_error"].is_null()) {
    g.backend_error = j["backend_error"].get<std::string>();
  }
  const auto kind = j.value("error_kind", std::string{"none"});
  for (auto k : {GenerationError::none, GenerationError::unreachable, GenerationError::rejected,
                 GenerationError::protocol, GenerationError::cancelled}) {
    if (to_string(k) == kind) g.error_kind = k;
  }
  return g;
}

std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& cfg,
                                                const Registry& registry) {
  cfg.validate();
  switch (cfg.kind) {
    case BackendKind::http_completion: return std::make_unique<HttpBackend>(cfg);
    case BackendKind::stub_oracle: return std::make_unique<OracleBackend>();
    case BackendKind::stub_constant: return std::make_unique<ConstantBackend>(cfg.constant_label);
    case BackendKind::stub_noisy_oracle:
      return std::make_unique<NoisyOracleBackend>(cfg.noise_p, cfg.noise_seed, registry);
  }
  throw ConfigError("unknown backend kind");
}

std::string http_complete_once(const BackendConfig& cfg, const Prompt& prompt) {
  const auto endpoint = split_endpoint(cfg.endpoint_url.value_or(""));
  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::milliseconds(cfg.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  if (const char* token = std::getenv(cfg.api_key_env.c_str()); token && *token) {
    client.set_bearer_token_auth(token);
  }

  nlohmann::json body;
  body["model"] = cfg.model_name.value_or("default");
  body["prompt"] = prompt.text;
  body["max_tokens"] = prompt.decoding.max_tokens;
  body["temperature"] = prompt.decoding.temperature;
  body["stop"] = prompt.decoding.stop;

  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) throw TransientError("request failed: " + httplib::to_string(res.error()));
  if (res->status >= 500 || res->status == 429) {
    throw TransientError(fmt::format("HTTP {} from {}", res->status, endpoint.path));
  }
  if (res->status >= 400) throw BackendRejected(res->status, res->body.substr(0, 200));
  if (res->status != 200) {
    throw ProtocolError(fmt::format("unexpected HTTP status {}", res->status));
  }

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw ProtocolError("response body is not JSON");
  }
  if (!parsed.is_object() || !parsed.contains("choices") || !parsed["choices"].is_array() ||
      parsed["choices"].empty() || !parsed["choices"][0].is_object() ||
      !parsed["choices"][0].contains("text") || !parsed["choices"][0]["text"].is_string()) {
    throw ProtocolError("response lacks choices[0].text");
  }
  return parsed["choices"][0]["text"].get<std::string>();
}

std::string prompt_hash(const Prompt& prompt) {
  std::string key = prompt.task_id;
  key += '\x1f';
  key += prompt.text;
  key += '\x1f';
  key += prompt.expected_output;
  return fmt::format("{:016x}", fnv1a64(key));
}

BatchResult run_batch(const std::vector<Prompt>& prompts, CompletionBackend& backend,
                      const BackendConfig& cfg, const BatchOptions& options) {
  if (prompts.empty()) throw Error("run_batch needs at least one prompt");
  cfg.validate();

  const std::size_t n = prompts.size();
  std::vector<std::string> hashes(n);
  for (std::size_t i = 0; i < n; ++i) hashes[i] = prompt_hash(prompts[i]);

  std::vector<std::optional<Generation>> slots(n);
  BatchResult result;

  if (options.checkpoint_path && std::filesystem::exists(*options.checkpoint_path)) {
    std::ifstream in(*options.checkpoint_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        continue;  // torn final line from an interrupted write
      }
      auto g = generation_from_json(j);
      if (g.prompt_index < 0 || static_cast<std::size_t>(g.prompt_index) >= n) continue;
      const auto idx = static_cast<std::size_t>(g.prompt_index);
      if (j.value("prompt_hash", std::string{}) != hashes[idx] || !g.ok()) continue;
      if (!slots[idx]) ++result.resumed;
      slots[idx] = std::move(g);
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i]) pending.push_back(i);
  }

  std::mutex mu;
  std::ofstream checkpoint;
  if (options.checkpoint_path) {
    if (options.checkpoint_path->has_parent_path()) {
      std::filesystem::create_directories(options.checkpoint_path->parent_path());
    }
    checkpoint.open(*options.checkpoint_path, std::ios::binary | std::ios::app);
    if (!checkpoint) throw Error("cannot open checkpoint " + options.checkpoint_path->string());
  }

  auto checkpoint_line = [&](const Generation& g) {
    auto j = to_json(g);
    j["prompt_hash"] = hashes[static_cast<std::size_t>(g.prompt_index)];
    return j.dump() + "\n";
  };

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t completed = 0;
  const auto start = Clock::now();
  const std::size_t every = std::max<std::size_t>(1, options.checkpoint_every);

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pending.size()) return;
      if (cfg.requests_per_second) {
        const auto offset = std::chrono::duration<double>(static_cast<double>(k) /
                                                          *cfg.requests_per_second);
        std::this_thread::sleep_until(start +
                                      std::chrono::duration_cast<Clock::duration>(offset));
      }
      const std::size_t idx = pending[k];
      Generation g;
      try {
        g = backend.complete(prompts[idx], static_cast<std::int64_t>(idx));
      } catch (const std::exception& e) {
        g = error_generation(static_cast<std::int64_t>(idx), GenerationError::protocol,
                             e.what(), 1, 0);
      }
      g.prompt_index = static_cast<std::int64_t>(idx);

      std::lock_guard lock(mu);
      if (checkpoint.is_open()) {
        checkpoint << checkpoint_line(g);
        if ((completed + 1) % every == 0) checkpoint.flush();
      }
      slots[idx] = std::move(g);
      ++completed;
      if (options.stop_after && completed >= *options.stop_after) stop.store(true);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.max_in_flight), pending.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (checkpoint.is_open()) checkpoint.close();

  result.generations.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (slots[i]) {
      result.generations.push_back(*slots[i]);
    } else {
      result.complete = false;
      result.generations.push_back(error_generation(static_cast<std::int64_t>(i),
                                                    GenerationError::cancelled,
                                                    "not attempted", 0, 0));
    }
  }

  std::size_t unreachable = 0;
  for (const auto& g : result.generations) {
    if (!g.ok()) ++result.error_count;
    if (g.error_kind == GenerationError::unreachable) ++unreachable;
  }
  if (result.complete && unreachable == n) {
    result.summary_error = fmt::format("backend unreachable on all {} prompts", n);
  } else if (result.error_count > 0) {
    result.summary_error = fmt::format("{} of {} prompts failed", result.error_count, n);
  }

  // A finished batch leaves a canonical checkpoint: one line per prompt,
  // sorted by index.
  if (options.checkpoint_path && result.complete) {
    std::string content;
    for (const auto& g : result.generations) content += checkpoint_line(g);
    write_file_atomically(*options.checkpoint_path, content);
  }
  return result;
}

}  // namespace socinstruct
