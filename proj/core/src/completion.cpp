#include "symsearch/completion.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <random>
#include <regex>
#include <thread>
#include <unordered_set>

#include "symsearch/error.hpp"

#ifdef SYMSEARCH_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace symsearch {

std::chrono::milliseconds BackoffPolicy::delay(int retry) const {
  const double ms = static_cast<double>(initial.count()) * std::pow(multiplier, std::max(0, retry - 1));
  return std::chrono::milliseconds(static_cast<long long>(std::min(ms, static_cast<double>(max.count()))));
}

CompletionResult complete_with_retry(CompletionClient& client, const CompletionRequest& request,
                                     int max_retries, const BackoffPolicy& backoff, const Sleeper& sleep) {
  CompletionResult result;
  for (int attempt = 0;; ++attempt) {
    try {
      auto resp = client.create(request);
      result.text = std::move(resp.text);
      result.total_tokens = resp.total_tokens;
      return result;
    } catch (const ServiceError& e) {
      if (!e.retryable()) throw;
      if (attempt >= max_retries) {
        throw RetriesExhaustedError("gave up after " + std::to_string(attempt + 1) + " attempts: " + e.what(),
                                    attempt + 1);
      }
      ++result.retries;
      const auto wait = backoff.delay(result.retries);
      spdlog::debug("completion attempt {} failed ({}); retrying in {} ms", attempt + 1, e.what(), wait.count());
      if (sleep) {
        sleep(wait);
      } else {
        std::this_thread::sleep_for(wait);
      }
    }
  }
}

// --- HTTP client ----------------------------------------------------------

HttpCompletionClient::HttpCompletionClient(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(endpoint_, m, kUrl)) {
    throw ServiceError("invalid completion endpoint '" + endpoint_ + "'");
  }
  origin_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/v1/completions";
#ifndef SYMSEARCH_WITH_OPENSSL
  if (origin_.rfind("https", 0) == 0) {
    throw ServiceError("this build has no TLS support; use an http:// endpoint");
  }
#endif
}

std::unique_ptr<HttpCompletionClient> HttpCompletionClient::from_env() {
  const char* url = std::getenv(kEndpointEnv);
  const char* key = std::getenv(kApiKeyEnv);
  if (!key || !*key) key = std::getenv("OPENAI_API_KEY");
  if (!key || !*key) {
    throw AuthError(std::string("no API key: set ") + kApiKeyEnv + " or OPENAI_API_KEY");
  }
  return std::make_unique<HttpCompletionClient>(url && *url ? url : kDefaultEndpoint, key);
}

CompletionResponse HttpCompletionClient::create(const CompletionRequest& request) {
  nlohmann::json body = {
      {"model", request.model},
      {"prompt", request.prompt},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  if (request.seed) body["seed"] = *request.seed;

  httplib::Client cli(origin_);
  cli.set_connection_timeout(std::chrono::seconds(30));
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + origin_ + " failed: " + httplib::to_string(res.error()));
  }
  const int status = res->status;
  if (status == 401 || status == 403) {
    throw AuthError("completion service rejected the credential (HTTP " + std::to_string(status) + ")");
  }
  if (status == 429) throw RateLimitError("completion service rate limit (HTTP 429)");
  if (status >= 500) throw TransportError("completion service error (HTTP " + std::to_string(status) + ")");
  if (status != 200) {
    throw MalformedResponseError("completion service refused the request (HTTP " + std::to_string(status) + ")");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception&) {
    throw MalformedResponseError("completion response is not JSON");
  }
  if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty() ||
      !j["choices"][0].is_object() || !j["choices"][0].contains("text") || !j["choices"][0]["text"].is_string()) {
    throw MalformedResponseError("completion response lacks choices[0].text");
  }
  CompletionResponse out;
  out.text = j["choices"][0]["text"].get<std::string>();
  if (j.contains("usage") && j["usage"].is_object() && j["usage"].contains("total_tokens") &&
      j["usage"]["total_tokens"].is_number_unsigned()) {
    out.total_tokens = j["usage"]["total_tokens"].get<std::size_t>();
  }
  return out;
}

// --- Mock client ----------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::array kOpenings = {
    "Last week my cat passed away and the apartment feels too quiet now.",
    "I moved to a new city for work a few months ago.",
    "My best friend stopped answering my messages after an argument.",
    "I finally finished my exams yesterday.",
    "My partner and I broke up right before the holidays.",
    "I lost my job in the spring and I am still looking.",
    "Yesterday I spent the whole afternoon alone in my room.",
    "My family came over for dinner on Sunday.",
    "I started a new medication two weeks ago.",
    "This morning I skipped class again.",
    "I used to play guitar every evening with my brother.",
    "My grandmother was in the hospital all of last month.",
};

constexpr std::array kFeelings = {
    "quietly", "constantly", "more than usual", "in waves", "every single day", "late at night",
};

constexpr std::array kMiddles = {
    "Lately {s} has been on my mind {f}.",
    "When it comes to {s}, I notice it {f} and it shapes my days.",
    "Thinking about {s} {f} makes it hard to focus on anything else.",
    "People keep asking me about {s} and I feel it {f}.",
    "I wrote in my journal about {s}, which shows up {f}.",
    "My therapist asked me to track {s} because it comes {f}.",
};

constexpr std::array kClosings = {
    "I am not sure what to do next.",
    "Some days are easier than others.",
    "I just wanted to get this off my chest.",
    "Has anyone else been through something like this?",
    "I keep hoping tomorrow will feel different.",
    "Writing it down here helps a little.",
    "",
    "",
};

std::string fill(std::string_view pattern, std::string_view symptom, std::string_view feeling) {
  std::string out(pattern);
  if (auto p = out.find("{s}"); p != std::string::npos) out.replace(p, 3, symptom);
  if (auto p = out.find("{f}"); p != std::string::npos) out.replace(p, 3, feeling);
  return out;
}

}  // namespace

CompletionResponse MockCompletionClient::create(const CompletionRequest& request) {
  static const std::regex kCount(R"(\"(\d+)\" diverse reddit posts)");
  static const std::regex kSymptom(R"(\"([^\"]+)\" symptom)");
  std::smatch m;
  int count = 30;
  if (std::regex_search(request.prompt, m, kCount)) count = std::stoi(m[1].str());
  std::string symptom = "this";
  if (std::regex_search(request.prompt, m, kSymptom)) {
    symptom = m[1].str();
    std::transform(symptom.begin(), symptom.end(), symptom.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }

  std::mt19937_64 rng(seed_ ^ fnv1a(request.prompt));
  constexpr std::size_t kCombos = kOpenings.size() * kFeelings.size() * kMiddles.size() * kClosings.size();
  // Distinct phrase combinations while the pool lasts.
  std::unordered_set<std::size_t> used;
  CompletionResponse out;
  for (int i = 1; i <= count; ++i) {
    std::size_t c = rng() % kCombos;
    if (used.size() < kCombos) {
      while (!used.insert(c).second) c = rng() % kCombos;
    }
    const std::string_view opening = kOpenings[c % kOpenings.size()];
    c /= kOpenings.size();
    const std::string_view feeling = kFeelings[c % kFeelings.size()];
    c /= kFeelings.size();
    const std::string_view middle = kMiddles[c % kMiddles.size()];
    c /= kMiddles.size();
    const std::string_view closing = kClosings[c % kClosings.size()];

    std::string post = std::string(opening) + " " + fill(middle, symptom, feeling);
    if (!closing.empty()) {
      post += ' ';
      post += closing;
    }
    out.text += std::to_string(i) + ". \"" + post + "\"\n";
  }
  out.total_tokens = (request.prompt.size() + out.text.size()) / 4;
  return out;
}

}  // namespace symsearch
