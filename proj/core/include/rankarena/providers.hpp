// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace rankarena {

class ResponseCache;

enum class RequestKind { Chat, Embed, Nli };

std::string_view to_string(RequestKind kind);

/// A provider call in canonical form; the unit the response cache keys on.
struct ProviderRequest {
  RequestKind kind = RequestKind::Chat;
  std::string model;
  nlohmann::json payload;
  double temperature = 0.0;        // chat only
  std::uint64_t sample_index = 0;  // chat only
};

struct CacheKey {
  std::string digest;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

/// Key-sorted, whitespace-free JSON serialization.
std::string canonicalize(const nlohmann::json& value);
nlohmann::json canonical_request(const ProviderRequest& request);
CacheKey cache_key(const ProviderRequest& request);

struct ChatRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  /// Distinguishes repeated stochastic samples of the same prompt.
  std::uint64_t sample_index = 0;
  double top_p = 1.0;
};

ProviderRequest to_provider_request(const ChatRequest& request);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Text embedding service. embed() validates what the backend returns:
/// finite values and one fixed dimension across all calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  std::vector<double> embed(std::string_view text);
  std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts);

  virtual std::string model() const = 0;

 protected:
  virtual std::vector<double> compute_embedding(std::string_view text) = 0;

 private:
  std::mutex dim_mutex_;
  std::size_t dimension_ = 0;
};

/// Entailment probability of `hypothesis` given `premise`. Values outside
/// [0, 1] from the backend are clamped with a warning.
class NliProvider {
 public:
  virtual ~NliProvider() = default;

  double entail(std::string_view premise, std::string_view hypothesis);

  virtual std::string model() const = 0;

 protected:
  virtual double raw_entail(std::string_view premise, std::string_view hypothesis) = 0;
};

/// Cache-first chat provider. A null backend disables the network: misses
/// throw CacheMissError naming the key.
class CachedChatProvider final : public ChatProvider {
 public:
  CachedChatProvider(std::shared_ptr<ChatProvider> backend,
                     std::shared_ptr<ResponseCache> cache);

  std::string complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatProvider> backend_;
  std::shared_ptr<ResponseCache> cache_;
};

class CachedEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::string model, std::shared_ptr<EmbeddingProvider> backend,
                          std::shared_ptr<ResponseCache> cache);

  std::string model() const override { return model_; }

 protected:
  std::vector<double> compute_embedding(std::string_view text) override;

 private:
  std::string model_;
  std::shared_ptr<EmbeddingProvider> backend_;
  std::shared_ptr<ResponseCache> cache_;
  std::mutex memo_mutex_;
  std::unordered_map<std::string, std::vector<double>> memo_;
};

class CachedNliProvider final : public NliProvider {
 public:
  CachedNliProvider(std::string model, std::shared_ptr<NliProvider> backend,
                    std::shared_ptr<ResponseCache> cache);

  std::string model() const override { return model_; }

 protected:
  double raw_entail(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::string model_;
  std::shared_ptr<NliProvider> backend_;
  std::shared_ptr<ResponseCache> cache_;
};

}  // namespace rankarena
