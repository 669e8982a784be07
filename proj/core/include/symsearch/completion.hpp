#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace symsearch {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.7;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;
};

struct CompletionResponse {
  std::string text;
  std::size_t total_tokens = 0;
};

/// A text-completion service. Implementations throw the ServiceError
/// subclasses from error.hpp and must tolerate concurrent calls.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual CompletionResponse create(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// OpenAI-completions-compatible HTTP client: POSTs {model, prompt,
/// temperature, max_tokens} and reads choices[0].text.
class HttpCompletionClient final : public CompletionClient {
 public:
  static constexpr const char* kEndpointEnv = "SYMSEARCH_COMPLETIONS_URL";
  static constexpr const char* kApiKeyEnv = "SYMSEARCH_API_KEY";
  static constexpr const char* kDefaultEndpoint = "https://api.openai.com/v1/completions";

  HttpCompletionClient(std::string endpoint, std::string api_key,
                       std::chrono::seconds timeout = std::chrono::seconds(120));

  /// Reads the endpoint and key from the environment (falling back to
  /// OPENAI_API_KEY). Throws AuthError when no key is set.
  static std::unique_ptr<HttpCompletionClient> from_env();

  CompletionResponse create(const CompletionRequest& request) override;
  std::string name() const override { return "http"; }

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Offline stand-in for the service. Output depends only on the seed and
/// the prompt: it reads the requested count and symptom name back out of
/// the prompt and returns that many enumerated, quoted 2-3 sentence posts
/// assembled from fixed phrase pools. Posts never repeat the response
/// option's text.
class MockCompletionClient final : public CompletionClient {
 public:
  explicit MockCompletionClient(std::uint64_t seed) : seed_(seed) {}

  CompletionResponse create(const CompletionRequest& request) override;
  std::string name() const override { return "mock"; }

 private:
  std::uint64_t seed_;
};

struct BackoffPolicy {
  std::chrono::milliseconds initial{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max{30000};

  /// Delay before retry number `retry` (1-based).
  std::chrono::milliseconds delay(int retry) const;
};

struct CompletionResult {
  std::string text;
  int retries = 0;
  std::size_t total_tokens = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Calls the client, retrying retryable failures up to `max_retries` times
/// with exponential backoff. Non-retryable errors propagate at once; when
/// retries run out a RetriesExhaustedError carries the last failure.
CompletionResult complete_with_retry(CompletionClient& client, const CompletionRequest& request,
                                     int max_retries, const BackoffPolicy& backoff,
                                     const Sleeper& sleep = {});

}  // namespace symsearch
