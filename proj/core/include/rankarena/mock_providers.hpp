// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "rankarena/providers.hpp"

namespace rankarena {

/// Deterministic hashed bag-of-words embedder: each token increments one of
/// `dimension` buckets chosen by FNV-1a. Counts are non-negative, so cosine
/// similarity between any two texts lies in [0, 1].
class HashedBowEmbedder final : public EmbeddingProvider {
 public:
  explicit HashedBowEmbedder(std::size_t dimension = 256);

  std::string model() const override { return "hashed-bow-" + std::to_string(dimension_); }
  std::size_t dimension() const noexcept { return dimension_; }
  static std::size_t bucket(std::string_view term, std::size_t dimension);

 protected:
  std::vector<double> compute_embedding(std::string_view text) override;

 private:
  std::size_t dimension_;
};

class FixedNli final : public NliProvider {
 public:
  explicit FixedNli(double probability) : probability_(probability) {}
  std::string model() const override { return "fixed-nli"; }

 protected:
  double raw_entail(std::string_view, std::string_view) override { return probability_; }

 private:
  double probability_;
};

class FunctionNli final : public NliProvider {
 public:
  using Fn = std::function<double(std::string_view premise, std::string_view hypothesis)>;
  explicit FunctionNli(Fn fn, std::string model = "function-nli")
      : fn_(std::move(fn)), model_(std::move(model)) {}
  std::string model() const override { return model_; }

 protected:
  double raw_entail(std::string_view p, std::string_view h) override { return fn_(p, h); }

 private:
  Fn fn_;
  std::string model_;
};

/// Offline stand-in for an NLI service: the probability is the fraction of
/// the hypothesis' terms that also occur in the premise.
class LexicalOverlapNli final : public NliProvider {
 public:
  std::string model() const override { return "lexical-overlap-nli"; }

 protected:
  double raw_entail(std::string_view premise, std::string_view hypothesis) override;
};

class FunctionChatProvider final : public ChatProvider {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionChatProvider(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  Fn fn_;
};

/// Offline simulated LLM. Reads the query and candidate document out of the
/// rendered prompt and produces a deterministic edit: query terms inserted,
/// words dropped or swapped. The output depends only on (model, prompt,
/// temperature, sample_index); at temperature 0 the sample index is ignored.
/// Without a candidate document (the initial-document prompt) it writes a
/// fresh query-focused text.
class MockChatProvider final : public ChatProvider {
 public:
  std::string complete(const ChatRequest& request) override;
};

}  // namespace rankarena
