#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "deepnews/backend.hpp"
#include "deepnews/error.hpp"

namespace deepnews {

HttpBackend::HttpBackend(HttpConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.base_url, m, url)) fail(ErrorKind::Config, "invalid base_url " + config_.base_url);
  scheme_host_port_ = m[1].str();
  path_prefix_ = m[2].matched ? m[2].str() : "";
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  if (config_.retries < 0) fail(ErrorKind::Config, "retries must be >= 0");
  if (!(config_.timeout_s > 0.0)) fail(ErrorKind::Config, "timeout must be > 0");
}

namespace {

bool retryable(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

Completion HttpBackend::complete(const std::string& prompt, const DecodeParams& params, std::uint64_t seed) {
  nlohmann::json body;
  body["model"] = config_.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  body["seed"] = seed & 0x7fffffffffffffffULL;
  if (config_.request_logprobs) body["logprobs"] = true;
  const auto payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto secs = static_cast<time_t>(config_.timeout_s);
  const auto usecs = static_cast<time_t>((config_.timeout_s - static_cast<double>(secs)) * 1e6);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    const auto started = std::chrono::steady_clock::now();
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      last_error = "transport: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      if (retryable(res->status)) continue;
      fail(ErrorKind::Transport, "chat completion failed: " + last_error);
    }
    Completion c;
    try {
      const auto j = nlohmann::json::parse(res->body);
      const auto& choice = j.at("choices").at(0);
      c.text = choice.at("message").at("content").get<std::string>();
      if (j.contains("usage")) {
        c.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0LL);
        c.usage.completion_tokens = j["usage"].value("completion_tokens", 0LL);
      }
      if (choice.contains("logprobs") && choice["logprobs"].is_object() && choice["logprobs"].contains("content")) {
        double sum = 0.0;
        for (const auto& tok : choice["logprobs"]["content"]) sum += tok.value("logprob", 0.0);
        c.total_logprob = sum;
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Transport, std::string("malformed chat completion response: ") + e.what());
    }
    c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return c;
  }
  fail(ErrorKind::Transport, "chat completion failed after " + std::to_string(config_.retries + 1) +
                                 " attempts: " + last_error);
}

}  // namespace deepnews
