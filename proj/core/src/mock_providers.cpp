// SPDX-License-Identifier: Apache-2.0
#include "rankarena/mock_providers.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

#include "rankarena/corpus.hpp"
#include "rankarena/hashing.hpp"

namespace rankarena {
namespace {

constexpr std::array<std::string_view, 48> kFiller = {
    "information", "guide",    "overview",  "important", "practical", "detailed",
    "benefits",    "common",   "options",   "research",  "experts",   "recent",
    "covers",      "explains", "including", "history",   "example",   "quality",
    "useful",      "several",  "factors",   "approach",  "modern",    "simple",
    "clear",       "reliable", "resources", "methods",   "results",   "typical",
    "users",       "provides", "relevant",  "answers",   "questions", "topic",
    "helps",       "context",  "features",  "compare",   "choose",    "steps",
    "key",         "facts",    "widely",    "known",     "popular",   "essential"};

std::string trim_copy(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string extract_line_after(std::string_view prompt, std::string_view marker) {
  const auto pos = prompt.find(marker);
  if (pos == std::string_view::npos) return {};
  const auto start = pos + marker.size();
  const auto end = prompt.find('\n', start);
  return trim_copy(prompt.substr(start, end == std::string_view::npos ? end : end - start));
}

std::string extract_document(std::string_view prompt) {
  constexpr std::string_view kMarker = "Candidate Document:";
  constexpr std::string_view kEnd = "Edited Document:";
  const auto pos = prompt.rfind(kMarker);
  if (pos == std::string_view::npos) return {};
  const auto start = pos + kMarker.size();
  const auto end = prompt.find(kEnd, start);
  return trim_copy(prompt.substr(start, end == std::string_view::npos ? end : end - start));
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string write_initial(std::string_view query, Rng& rng) {
  const auto terms = split_words(query);
  std::vector<std::string> words;
  const auto target = 125 + rng.below(40);
  words.insert(words.end(), terms.begin(), terms.end());
  while (words.size() < target) {
    if (!terms.empty() && rng.chance(0.2)) {
      words.push_back(terms[rng.below(terms.size())]);
    } else {
      words.emplace_back(kFiller[rng.below(kFiller.size())]);
    }
    if (rng.chance(0.08)) words.back() += '.';
  }
  auto text = join(words);
  if (!text.empty() && text.back() != '.') text += '.';
  return text;
}

std::string edit_document(std::string_view document, std::string_view query, double temperature,
                          Rng& rng) {
  auto words = split_words(document);
  const auto terms = split_words(query);
  const int edits = 2 + static_cast<int>(temperature * 4.0);
  for (int i = 0; i < edits; ++i) {
    const double roll = rng.uniform();
    if (roll < 0.45 && !terms.empty()) {
      const auto at = words.empty() ? 0 : rng.below(words.size() + 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                   terms[rng.below(terms.size())]);
    } else if (roll < 0.7 && words.size() > 20) {
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(rng.below(words.size())));
    } else if (!words.empty()) {
      words[rng.below(words.size())] = std::string(kFiller[rng.below(kFiller.size())]);
    }
  }
  return join(words);
}

}  // namespace

HashedBowEmbedder::HashedBowEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) dimension_ = 1;
}

std::size_t HashedBowEmbedder::bucket(std::string_view term, std::size_t dimension) {
  return static_cast<std::size_t>(fnv1a64(term) % dimension);
}

std::vector<double> HashedBowEmbedder::compute_embedding(std::string_view text) {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& t : tokenize(text)) v[bucket(t, dimension_)] += 1.0;
  return v;
}

double LexicalOverlapNli::raw_entail(std::string_view premise, std::string_view hypothesis) {
  const auto p = tokenize(premise);
  const std::set<std::string> vocab(p.begin(), p.end());
  const auto h = tokenize(hypothesis);
  if (h.empty()) return 1.0;
  const auto hits = std::count_if(h.begin(), h.end(),
                                  [&](const std::string& t) { return vocab.contains(t); });
  return static_cast<double>(hits) / static_cast<double>(h.size());
}

std::string MockChatProvider::complete(const ChatRequest& request) {
  std::uint64_t seed = fnv1a64(request.prompt, fnv1a64(request.model));
  if (request.temperature > 0.0) seed = derive_seed(seed, request.sample_index);
  Rng rng(seed);

  const auto query = extract_line_after(request.prompt, "Candidate Query:");
  const auto document = extract_document(request.prompt);
  if (document.empty()) return write_initial(query, rng);

  auto text = edit_document(document, query, request.temperature, rng);
  // Occasionally echo the label the prompt ends with, as chat models do.
  if (rng.chance(0.1)) text = "Edited Document: " + text;
  return text;
}

}  // namespace rankarena
