// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "rankarena/providers.hpp"

namespace rankarena {

/// Caps the number of concurrent network calls across all HTTP providers
/// that share it.
class InflightLimiter {
 public:
  explicit InflightLimiter(int max_inflight);

  class Slot {
   public:
    explicit Slot(InflightLimiter& limiter) : limiter_(limiter) { limiter_.sem_.acquire(); }
    ~Slot() { limiter_.sem_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InflightLimiter& limiter_;
  };

 private:
  std::counting_semaphore<4096> sem_;
};

struct HttpOptions {
  /// Full endpoint URL, e.g. http://localhost:8000/v1/chat/completions.
  std::string url;
  /// Sent as a bearer token when non-empty. Never logged.
  std::string api_key;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};
  std::shared_ptr<InflightLimiter> limiter;
};

/// Environment variable names for endpoint configuration.
inline constexpr const char* kChatUrlEnv = "RANKARENA_CHAT_URL";
inline constexpr const char* kChatKeyEnv = "RANKARENA_CHAT_KEY";
inline constexpr const char* kEmbedUrlEnv = "RANKARENA_EMBED_URL";
inline constexpr const char* kNliUrlEnv = "RANKARENA_NLI_URL";

/// POSTs `body` as JSON and decodes a JSON response, retrying transport
/// errors, 429 and 5xx with exponential backoff. Throws ProviderError when
/// retries are exhausted and DecodeError for an unparseable body.
nlohmann::json post_json(const HttpOptions& options, const nlohmann::json& body);

/// OpenAI-compatible /chat/completions client.
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpOptions options);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpOptions options_;
};

/// OpenAI-compatible /embeddings client.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string model, HttpOptions options);
  std::string model() const override { return model_; }

 protected:
  std::vector<double> compute_embedding(std::string_view text) override;

 private:
  std::string model_;
  HttpOptions options_;
};

/// Minimal entailment service: POST {premise, hypothesis} -> {probability}.
class HttpNliProvider final : public NliProvider {
 public:
  HttpNliProvider(std::string model, HttpOptions options);
  std::string model() const override { return model_; }

 protected:
  double raw_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::string model_;
  HttpOptions options_;
};

}  // namespace rankarena
