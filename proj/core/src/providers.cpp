// SPDX-License-Identifier: Apache-2.0
#include "rankarena/providers.hpp"

#include <cmath>
#include <utility>

#include "rankarena/cache.hpp"
#include "rankarena/error.hpp"
#include "rankarena/hashing.hpp"
#include "rankarena/log.hpp"

namespace rankarena {

std::string_view to_string(RequestKind kind) {
  switch (kind) {
    case RequestKind::Chat: return "chat";
    case RequestKind::Embed: return "embed";
    case RequestKind::Nli: return "nli";
  }
  return "unknown";
}

std::string canonicalize(const nlohmann::json& value) {
  // nlohmann::json objects are std::map backed, so dump() is key-sorted.
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

nlohmann::json canonical_request(const ProviderRequest& request) {
  nlohmann::json out{
      {"kind", std::string(to_string(request.kind))},
      {"model", request.model},
      {"payload", request.payload},
  };
  if (request.kind == RequestKind::Chat) {
    out["temperature"] = request.temperature;
    out["sample_index"] = request.sample_index;
  }
  return out;
}

CacheKey cache_key(const ProviderRequest& request) {
  return CacheKey{sha256_hex(canonicalize(canonical_request(request)))};
}

ProviderRequest to_provider_request(const ChatRequest& request) {
  ProviderRequest out;
  out.kind = RequestKind::Chat;
  out.model = request.model;
  out.payload = {{"prompt", request.prompt}, {"top_p", request.top_p}};
  out.temperature = request.temperature;
  out.sample_index = request.sample_index;
  return out;
}

std::vector<double> EmbeddingProvider::embed(std::string_view text) {
  auto v = compute_embedding(text);
  if (v.empty()) throw DegenerateVectorError("embedding provider returned an empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw DegenerateVectorError("embedding provider returned a non-finite value");
    }
  }
  std::lock_guard lock(dim_mutex_);
  if (dimension_ == 0) {
    dimension_ = v.size();
  } else if (v.size() != dimension_) {
    throw DecodeError("embedding dimension changed from " +
                                std::to_string(dimension_) + " to " +
                                std::to_string(v.size()));
  }
  return v;
}

std::vector<std::vector<double>> EmbeddingProvider::embed_batch(
    std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    out.push_back(embed(t));
    if (out.back().size() != out.front().size()) {
      throw DegenerateVectorError("embedding dimension mismatch within batch");
    }
  }
  return out;
}

double NliProvider::entail(std::string_view premise, std::string_view hypothesis) {
  const double p = raw_entail(premise, hypothesis);
  if (std::isnan(p)) throw DecodeError("NLI provider returned NaN");
  if (p < 0.0 || p > 1.0) {
    log::warn("NLI probability " + std::to_string(p) + " outside [0, 1]; clamped");
    return p < 0.0 ? 0.0 : 1.0;
  }
  return p;
}

CachedChatProvider::CachedChatProvider(std::shared_ptr<ChatProvider> backend,
                                       std::shared_ptr<ResponseCache> cache)
    : backend_(std::move(backend)), cache_(std::move(cache)) {}

std::string CachedChatProvider::complete(const ChatRequest& request) {
  const auto req = to_provider_request(request);
  const auto key = cache_key(req);
  if (auto hit = cache_->load(RequestKind::Chat, key)) {
    if (!hit->is_string()) throw DecodeError("cached chat entry is not a string: " + key.digest);
    return hit->get<std::string>();
  }
  if (!backend_) throw CacheMissError("chat", key.digest);
  auto text = backend_->complete(request);
  cache_->store(RequestKind::Chat, key, canonical_request(req), text);
  return text;
}

CachedEmbeddingProvider::CachedEmbeddingProvider(std::string model,
                                                 std::shared_ptr<EmbeddingProvider> backend,
                                                 std::shared_ptr<ResponseCache> cache)
    : model_(std::move(model)), backend_(std::move(backend)), cache_(std::move(cache)) {}

std::vector<double> CachedEmbeddingProvider::compute_embedding(std::string_view text) {
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find(std::string(text)); it != memo_.end()) return it->second;
  }
  ProviderRequest req;
  req.kind = RequestKind::Embed;
  req.model = model_;
  req.payload = {{"input", std::string(text)}};
  const auto key = cache_key(req);
  std::vector<double> v;
  if (auto hit = cache_->load(RequestKind::Embed, key)) {
    try {
      v = hit->get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw DecodeError("cached embedding entry is malformed: " + key.digest);
    }
  } else {
    if (!backend_) throw CacheMissError("embed", key.digest);
    v = backend_->embed(text);
    cache_->store(RequestKind::Embed, key, canonical_request(req), v);
  }
  std::lock_guard lock(memo_mutex_);
  memo_.emplace(std::string(text), v);
  return v;
}

CachedNliProvider::CachedNliProvider(std::string model, std::shared_ptr<NliProvider> backend,
                                     std::shared_ptr<ResponseCache> cache)
    : model_(std::move(model)), backend_(std::move(backend)), cache_(std::move(cache)) {}

double CachedNliProvider::raw_entail(std::string_view premise, std::string_view hypothesis) {
  ProviderRequest req;
  req.kind = RequestKind::Nli;
  req.model = model_;
  req.payload = {{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}};
  const auto key = cache_key(req);
  if (auto hit = cache_->load(RequestKind::Nli, key)) {
    if (!hit->is_number()) throw DecodeError("cached NLI entry is malformed: " + key.digest);
    return hit->get<double>();
  }
  if (!backend_) throw CacheMissError("nli", key.digest);
  // The backend's own entail() already clamps; cache what callers will see.
  const double p = backend_->entail(premise, hypothesis);
  cache_->store(RequestKind::Nli, key, canonical_request(req), p);
  return p;
}

}  // namespace rankarena
