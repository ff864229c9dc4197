#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "socinstruct/gateway.hpp"
#include "test_util.hpp"

using namespace socinstruct;
using namespace std::chrono_literals;

namespace {

std::vector<Prompt> prompts_for(const std::string& task, std::size_t n) {
  const auto& t = get_task(task);
  std::vector<Prompt> out;
  for (std::size_t i = 0; i < n; ++i) {
    InstructionInstance inst;
    inst.task_id = task;
    inst.instruction = t.instruction_text;
    inst.input = "input " + std::to_string(i);
    inst.gold = t.label_set[i % t.label_set.size()];
    inst.source_index = static_cast<std::int64_t>(i);
    out.push_back(build_zero_shot(inst));
  }
  return out;
}

BackendConfig stub(BackendKind kind) {
  BackendConfig cfg;
  cfg.kind = kind;
  return cfg;
}

// Records the peak number of concurrent complete() calls.
class CountingBackend : public CompletionBackend {
 public:
  Generation complete(const Prompt& prompt, std::int64_t index) override {
    const int now = ++in_flight_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(3ms);
    --in_flight_;
    Generation g;
    g.prompt_index = index;
    g.raw_text = prompt.expected_output;
    g.attempts = 1;
    return g;
  }
  int peak() const { return peak_.load(); }

 private:
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

// Local completion server; handler decides the response.
class FakeServer {
 public:
  explicit FakeServer(httplib::Server::Handler handler) {
    server_.Post("/v1/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

BackendConfig http_config(const std::string& url) {
  BackendConfig cfg;
  cfg.kind = BackendKind::http_completion;
  cfg.endpoint_url = url;
  cfg.retry_backoff_ms = 1;
  cfg.timeout_ms = 2000;
  return cfg;
}

}  // namespace

TEST(Stubs, OracleAndConstant) {
  const auto prompts = prompts_for("sentiment", 9);
  auto oracle = make_backend(stub(BackendKind::stub_oracle));
  auto cfg = stub(BackendKind::stub_constant);
  cfg.constant_label = "neutral";
  auto constant = make_backend(cfg);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto g = oracle->complete(prompts[i], static_cast<std::int64_t>(i));
    EXPECT_EQ(g.raw_text, prompts[i].expected_output);
    EXPECT_EQ(g.prompt_index, static_cast<std::int64_t>(i));
    EXPECT_EQ(constant->complete(prompts[i], 0).raw_text, "neutral");
  }
}

TEST(Stubs, NoisyOracleFlipsAboutPAndIsDeterministic) {
  const auto prompts = prompts_for("offensive", 4000);
  auto cfg = stub(BackendKind::stub_noisy_oracle);
  cfg.noise_p = 0.3;
  cfg.noise_seed = 9;
  auto a = make_backend(cfg);
  auto b = make_backend(cfg);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto ga = a->complete(prompts[i], static_cast<std::int64_t>(i));
    ASSERT_EQ(ga, b->complete(prompts[i], static_cast<std::int64_t>(i)));
    if (*ga.raw_text != prompts[i].expected_output) ++wrong;
    const auto& labels = get_task("offensive").label_set;
    ASSERT_NE(std::find(labels.begin(), labels.end(), *ga.raw_text), labels.end());
  }
  // Binomial(4000, 0.3): sd ~ 29.
  EXPECT_NEAR(static_cast<double>(wrong), 1200.0, 150.0);
}

TEST(Stubs, ConfigValidation) {
  EXPECT_THROW(make_backend(stub(BackendKind::stub_constant)), ConfigError);
  auto http = stub(BackendKind::http_completion);
  EXPECT_THROW(make_backend(http), ConfigError);
  http.endpoint_url = "https://example.com";
  EXPECT_THROW(make_backend(http), ConfigError);
  auto noisy = stub(BackendKind::stub_noisy_oracle);
  noisy.noise_p = 1.5;
  EXPECT_THROW(make_backend(noisy), ConfigError);
  auto json_cfg = http_config("http://127.0.0.1:9");
  json_cfg.requests_per_second = 3;
  EXPECT_EQ(to_json(backend_config_from_json(to_json(json_cfg))), to_json(json_cfg));
}

TEST(Batch, OutputOrderMatchesInput) {
  const auto prompts = prompts_for("emotion", 200);
  auto backend = make_backend(stub(BackendKind::stub_oracle));
  const auto res = run_batch(prompts, *backend, stub(BackendKind::stub_oracle));
  ASSERT_EQ(res.generations.size(), 200u);
  EXPECT_TRUE(res.complete);
  EXPECT_EQ(res.error_count, 0u);
  EXPECT_FALSE(res.summary_error);
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    EXPECT_EQ(res.generations[i].prompt_index, static_cast<std::int64_t>(i));
    EXPECT_EQ(res.generations[i].raw_text, prompts[i].expected_output);
  }
}

TEST(Batch, InFlightNeverExceedsLimit) {
  const auto prompts = prompts_for("humor", 120);
  CountingBackend backend;
  auto cfg = stub(BackendKind::stub_oracle);
  const auto res = run_batch(prompts, backend, cfg);
  EXPECT_TRUE(res.complete);
  EXPECT_LE(backend.peak(), 8);
  EXPECT_GE(backend.peak(), 2);

  CountingBackend narrow;
  cfg.max_in_flight = 3;
  run_batch(prompts, narrow, cfg);
  EXPECT_LE(narrow.peak(), 3);
}

TEST(Batch, ResumeAfterInterruptionIsByteIdentical) {
  testutil::TempDir dir("resume");
  const auto prompts = prompts_for("intimacy", 157);
  auto cfg = stub(BackendKind::stub_noisy_oracle);
  cfg.noise_p = 0.4;
  cfg.noise_seed = 3;
  auto backend = make_backend(cfg);

  BatchOptions full{dir / "full.jsonl", 25, std::nullopt};
  const auto uninterrupted = run_batch(prompts, *backend, cfg, full);

  BatchOptions part{dir / "part.jsonl", 10, 60};
  const auto first = run_batch(prompts, *backend, cfg, part);
  EXPECT_FALSE(first.complete);
  EXPECT_GT(first.error_count, 0u);
  for (const auto& g : first.generations) {
    if (!g.ok()) EXPECT_EQ(g.error_kind, GenerationError::cancelled);
  }

  part.stop_after.reset();
  const auto resumed = run_batch(prompts, *backend, cfg, part);
  EXPECT_TRUE(resumed.complete);
  EXPECT_GE(resumed.resumed, 60u);
  EXPECT_LT(resumed.resumed, 157u);
  EXPECT_EQ(resumed.generations, uninterrupted.generations);
  EXPECT_EQ(testutil::slurp(dir / "part.jsonl"), testutil::slurp(dir / "full.jsonl"));
}

TEST(Batch, StaleCheckpointLinesAreIgnored) {
  testutil::TempDir dir("stale");
  auto cfg = stub(BackendKind::stub_oracle);
  auto backend = make_backend(cfg);
  BatchOptions opts{dir / "ck.jsonl", 25, std::nullopt};
  run_batch(prompts_for("irony", 10), *backend, cfg, opts);
  // Different prompts, same checkpoint: nothing may be reused.
  const auto res = run_batch(prompts_for("hyperbole", 10), *backend, cfg, opts);
  EXPECT_EQ(res.resumed, 0u);
  EXPECT_EQ(res.generations[0].raw_text, "hyperbole");

  // A torn final line is skipped rather than fatal.
  testutil::spit(dir / "ck.jsonl", testutil::slurp(dir / "ck.jsonl") + "{\"prompt_ind");
  EXPECT_EQ(run_batch(prompts_for("hyperbole", 10), *backend, cfg, opts).resumed, 10u);
}

TEST(Http, SuccessSendsRequestShapeAndAuth) {
  std::mutex mu;
  nlohmann::json seen_body;
  std::string seen_auth;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mu);
      seen_body = nlohmann::json::parse(req.body);
      seen_auth = req.get_header_value("Authorization");
    }
    res.set_content(R"({"choices":[{"text":" humorous\n"}]})", "application/json");
  });
  ::setenv("SOCINSTRUCT_TEST_TOKEN", "s3cret", 1);
  auto cfg = http_config(server.url());
  cfg.api_key_env = "SOCINSTRUCT_TEST_TOKEN";
  cfg.model_name = "tiny";
  const auto prompts = prompts_for("humor", 3);
  auto backend = make_backend(cfg);
  const auto g = backend->complete(prompts[1], 1);
  ASSERT_TRUE(g.ok()) << g.backend_error.value_or("");
  EXPECT_EQ(*g.raw_text, " humorous\n");
  EXPECT_EQ(g.attempts, 1);
  EXPECT_EQ(seen_auth, "Bearer s3cret");
  EXPECT_EQ(seen_body["prompt"], prompts[1].text);
  EXPECT_EQ(seen_body["model"], "tiny");
  EXPECT_EQ(seen_body["max_tokens"], 16);
  EXPECT_EQ(seen_body["temperature"], 0.0);
  EXPECT_EQ(seen_body["stop"], nlohmann::json::array({"\n"}));
  EXPECT_FALSE(seen_body.contains("expected_output"));
  ::unsetenv("SOCINSTRUCT_TEST_TOKEN");
}

TEST(Http, ClientErrorIsNotRetried) {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 400;
    res.set_content("bad prompt", "text/plain");
  });
  auto backend = make_backend(http_config(server.url()));
  const auto g = backend->complete(prompts_for("irony", 1)[0], 0);
  EXPECT_FALSE(g.ok());
  EXPECT_EQ(g.error_kind, GenerationError::rejected);
  EXPECT_EQ(hits.load(), 1);
  EXPECT_NE(g.backend_error->find("400"), std::string::npos);
}

TEST(Http, ThrottlingAndServerErrorsAreRetriedThenSucceed) {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = hits == 1 ? 429 : 503;
      return;
    }
    res.set_content(R"({"choices":[{"text":"ironic"}]})", "application/json");
  });
  auto backend = make_backend(http_config(server.url()));
  const auto g = backend->complete(prompts_for("irony", 1)[0], 0);
  ASSERT_TRUE(g.ok());
  EXPECT_EQ(g.attempts, 3);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, RetriesAreBoundedByMaxRetries) {
  std::atomic<int> hits{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 500;
  });
  auto cfg = http_config(server.url());
  cfg.max_retries = 2;
  auto backend = make_backend(cfg);
  const auto g = backend->complete(prompts_for("irony", 1)[0], 0);
  EXPECT_EQ(g.error_kind, GenerationError::unreachable);
  EXPECT_EQ(g.attempts, 3);
  EXPECT_EQ(hits.load(), 3);
}

TEST(Http, MalformedBodyIsProtocolError) {
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (req.body.find("input 0") != std::string::npos) {
      res.set_content("not json at all", "text/plain");
    } else {
      res.set_content(R"({"choices":[]})", "application/json");
    }
  });
  auto backend = make_backend(http_config(server.url()));
  const auto prompts = prompts_for("irony", 2);
  EXPECT_EQ(backend->complete(prompts[0], 0).error_kind, GenerationError::protocol);
  EXPECT_EQ(backend->complete(prompts[1], 1).error_kind, GenerationError::protocol);
  EXPECT_THROW(http_complete_once(http_config(server.url()), prompts[1]), ProtocolError);
}

TEST(Http, UnreachableOnEveryPromptIsSummarized) {
  // Grab a free port, then close it so nothing listens there.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  auto cfg = http_config("http://127.0.0.1:" + std::to_string(port));
  cfg.max_retries = 1;
  cfg.timeout_ms = 200;
  auto backend = make_backend(cfg);
  const auto res = run_batch(prompts_for("irony", 5), *backend, cfg);
  EXPECT_TRUE(res.complete);
  EXPECT_EQ(res.error_count, 5u);
  ASSERT_TRUE(res.summary_error);
  EXPECT_EQ(*res.summary_error, "backend unreachable on all 5 prompts");
  for (const auto& g : res.generations) {
    EXPECT_EQ(g.error_kind, GenerationError::unreachable);
    EXPECT_NE(g.backend_error->find("BackendUnreachable after 2 attempts"), std::string::npos);
  }
}

TEST(Http, BatchThroughServerKeepsOrder) {
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    const auto body = nlohmann::json::parse(req.body);
    const auto prompt = body["prompt"].get<std::string>();
    // Echo the input line back so order can be checked.
    const auto pos = prompt.rfind("Input: ");
    const auto end = prompt.find("\n", pos);
    nlohmann::json out;
    out["choices"] = nlohmann::json::array({{{"text", prompt.substr(pos + 7, end - pos - 7)}}});
    res.set_content(out.dump(), "application/json");
  });
  const auto cfg = http_config(server.url());
  auto backend = make_backend(cfg);
  const auto res = run_batch(prompts_for("emotion", 40), *backend, cfg);
  ASSERT_TRUE(res.complete);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(res.generations[i].raw_text, "input " + std::to_string(i));
  }
}

TEST(Batch, RateLimitWithinTenPercent) {
  const auto prompts = prompts_for("humor", 31);
  auto cfg = stub(BackendKind::stub_oracle);
  cfg.requests_per_second = 50.0;
  auto backend = make_backend(cfg);
  const auto start = std::chrono::steady_clock::now();
  const auto res = run_batch(prompts, *backend, cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_TRUE(res.complete);
  const double expected = 30.0 / 50.0;  // last dispatch at (n - 1) / rps
  EXPECT_GE(elapsed, expected * 0.9);
  EXPECT_LE(elapsed, expected * 1.1);
}

TEST(GenerationJson, RoundTrip) {
  Generation g;
  g.prompt_index = 4;
  g.backend_error = "BackendRejected: HTTP 400";
  g.error_kind = GenerationError::rejected;
  g.attempts = 1;
  EXPECT_EQ(generation_from_json(to_json(g)), g);
  g = Generation{7, "ok", 12, 2, std::nullopt, GenerationError::none};
  EXPECT_EQ(generation_from_json(to_json(g)), g);
}
