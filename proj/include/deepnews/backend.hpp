#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "deepnews/metrics.hpp"

namespace deepnews {

struct DecodeParams {
  double temperature = 0.7;
  int max_tokens = 1024;
};

struct Completion {
  std::string text;
  std::optional<double> total_logprob;
  TokenUsage usage;
  double latency_ms = 0.0;
};

struct BackendCapabilities {
  bool returns_token_logprobs = false;
};

/// Implementations must accept concurrent complete() calls.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual BackendCapabilities capabilities() const = 0;
  virtual std::string model_id() const = 0;
  /// Throws Error(Transport) when the backend cannot produce a completion.
  virtual Completion complete(const std::string& prompt, const DecodeParams& params, std::uint64_t seed) = 0;
};

enum class MockMode {
  Conforming,         // honours the constraint lines present in the prompt
  Monotone,           // every sentence the same length, constraints ignored
  RecoverOnFeedback,  // monotone until the prompt carries violation feedback
};

std::string_view to_string(MockMode m);
std::optional<MockMode> parse_mock_mode(std::string_view s);

struct MockConfig {
  MockMode mode = MockMode::Conforming;
  std::size_t monotone_tokens = 20;
  /// Section names whose first block gets one invented percentage.
  std::set<std::string> inject_ungrounded;
  /// Section names for which every call fails with a transport error.
  std::set<std::string> fail_sections;
  int delay_ms = 0;
  bool report_logprobs = false;
};

/// Template realizer: writes block text from the facts listed in the prompt
/// and nothing else. Output is a pure function of (prompt, seed, config).
class MockBackend : public GenerationBackend {
 public:
  explicit MockBackend(MockConfig config = {});

  BackendCapabilities capabilities() const override { return {config_.report_logprobs}; }
  std::string model_id() const override { return "mock-realizer-1"; }
  Completion complete(const std::string& prompt, const DecodeParams& params, std::uint64_t seed) override;

  std::size_t calls() const { return calls_.load(); }
  const MockConfig& config() const { return config_; }

 private:
  MockConfig config_;
  std::atomic<std::size_t> calls_{0};
};

struct HttpConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";  // chat/completions is appended
  std::string model = "deepseek-chat";
  double timeout_s = 60.0;
  int retries = 3;
  int backoff_ms = 250;  // doubled after each failed attempt
  std::string api_key_env = "DEEPNEWS_API_KEY";
  bool request_logprobs = false;
};

/// OpenAI-compatible chat-completions client.
class HttpBackend : public GenerationBackend {
 public:
  explicit HttpBackend(HttpConfig config);

  BackendCapabilities capabilities() const override { return {config_.request_logprobs}; }
  std::string model_id() const override { return config_.model; }
  Completion complete(const std::string& prompt, const DecodeParams& params, std::uint64_t seed) override;

 private:
  HttpConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

}  // namespace deepnews
