#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socinstruct/errors.hpp"
#include "socinstruct/prompt.hpp"
#include "socinstruct/registry.hpp"

namespace socinstruct {

class BackendRejected : public Error {
 public:
  BackendRejected(int status, const std::string& body)
      : Error("backend rejected request with HTTP " + std::to_string(status) + ": " + body),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

enum class BackendKind { http_completion, stub_oracle, stub_constant, stub_noisy_oracle };

std::string_view to_string(BackendKind k);
std::optional<BackendKind> parse_backend_kind(std::string_view s);

struct BackendConfig {
  BackendKind kind = BackendKind::stub_oracle;
  std::optional<std::string> endpoint_url;  // e.g. http://127.0.0.1:8000
  std::optional<std::string> model_name;
  std::string constant_label;               // stub_constant
  double noise_p = 0.0;                     // stub_noisy_oracle
  std::uint64_t noise_seed = 0;
  std::int64_t timeout_ms = 30000;
  int max_retries = 3;
  int max_in_flight = 8;
  std::optional<double> requests_per_second;
  std::int64_t retry_backoff_ms = 200;
  // Name of the environment variable holding the bearer token. The token
  // itself is read at request time and never stored here.
  std::string api_key_env = "SOCINSTRUCT_API_KEY";

  // Throws ConfigError.
  void validate() const;
};

nlohmann::ordered_json to_json(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const nlohmann::json& j);

enum class GenerationError { none, unreachable, rejected, protocol, cancelled };

std::string_view to_string(GenerationError e);

struct Generation {
  std::int64_t prompt_index = 0;
  std::optional<std::string> raw_text;
  std::int64_t latency_ms = 0;
  int attempts = 0;
  std::optional<std::string> backend_error;
  GenerationError error_kind = GenerationError::none;

  bool ok() const { return raw_text.has_value(); }
  bool operator==(const Generation&) const = default;
};

nlohmann::ordered_json to_json(const Generation& g);
Generation generation_from_json(const nlohmann::json& j);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Never throws for per-prompt failures; they come back as error
  // Generations. Must be safe to call from several threads at once.
  virtual Generation complete(const Prompt& prompt, std::int64_t prompt_index) = 0;
};

// Stubs that need the answer vocabulary look it up in the registry (the
// donor's labels for cross-task prompts).
std::unique_ptr<CompletionBackend> make_backend(const BackendConfig& cfg,
                                                const Registry& registry = Registry::builtin());

// Single request, no retries. Throws BackendRejected / ProtocolError, or
// std::runtime_error for network failures and timeouts.
std::string http_complete_once(const BackendConfig& cfg, const Prompt& prompt);

struct BatchOptions {
  std::optional<std::filesystem::path> checkpoint_path;
  std::size_t checkpoint_every = 25;
  // Stop after this many new completions; the checkpoint is flushed and the
  // batch is returned incomplete. Used to simulate interruption.
  std::optional<std::size_t> stop_after;
};

struct BatchResult {
  std::vector<Generation> generations;  // generations[i].prompt_index == i
  bool complete = true;
  std::size_t resumed = 0;
  std::size_t error_count = 0;
  std::optional<std::string> summary_error;
};

// Checkpoint lines carry the prompt hash so a resume against different
// prompts does not pick up stale answers.
std::string prompt_hash(const Prompt& prompt);

BatchResult run_batch(const std::vector<Prompt>& prompts, CompletionBackend& backend,
                      const BackendConfig& cfg, const BatchOptions& options = {});

}  // namespace socinstruct
